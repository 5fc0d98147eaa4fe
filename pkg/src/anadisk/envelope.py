"""The disk functional, its envelope and maximality checks.

For an upper semicontinuous ``phi`` on a ball ``D`` the envelope

    P(phi)(z) = inf { (1/2 pi) int phi(f(e^{i theta})) d theta : f(0) = z, f(U) in D }

is the largest plurisubharmonic minorant of ``phi``.  The infimum is taken
here over disks ``f = q o G_a`` where ``q`` is a polynomial with ``q(a) = z``
and ``G_a`` a disk automorphism, so every reported value is an upper bound
of the true envelope.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import minimize

from .disk import AnalyticMap, BoundaryGrid, MoebiusPrecompose, Polynomial, moebius
from .errors import ParameterError
from .hull import CompactSet
from .leaves import FiniteLeaf, cluster_sample
from .measures import random_bremermann
from .polynomial import MultiPoly, _as_points

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- ambient ball


@dataclass(frozen=True)
class Ball:
    """Open ball ``B(center, radius)`` in C^n."""

    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError("ball radius must be positive")

    @classmethod
    def unit(cls, n: int) -> "Ball":
        return cls(tuple([0j] * n), 1.0)

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center, dtype=complex)

    @property
    def dim(self) -> int:
        return len(self.center)

    def rel_radius(self, w) -> np.ndarray:
        return np.linalg.norm(np.asarray(w) - self.c, axis=-1)

    def contains(self, w, closed: bool = True) -> np.ndarray:
        r = self.rel_radius(w)
        return r <= self.radius if closed else r < self.radius

    def project(self, w) -> np.ndarray:
        """Radial projection onto the sphere (the center maps to a fixed pole)."""
        d = np.asarray(w, dtype=complex) - self.c
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        pole = np.zeros(self.dim, dtype=complex)
        pole[0] = 1
        u = np.where(r > 0, d / np.where(r > 0, r, 1), pole)
        return self.c + self.radius * u


# ---------------------------------------------------------------- usc functions


class UscFunction:
    """Base class; subclasses evaluate ``phi`` on points of shape (..., n)."""

    kind = "usc"

    def __call__(self, w) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError


class PolyZZbar(UscFunction):
    """``Re sum c_ab z^a conj(z)^b``; ``terms`` maps (a, b) multi-index pairs to c."""

    kind = "poly_zzbar"

    def __init__(self, terms: dict, n: int):
        exps, cs = [], []
        for (a, b), c in terms.items():
            exps.append(tuple(a) + tuple(b))
            cs.append(c)
        self.n = n
        self.terms = dict(terms)
        self._p = MultiPoly(np.array(exps, dtype=int).reshape(-1, 2 * n), cs)

    @classmethod
    def real_part(cls, i: int, n: int) -> "PolyZZbar":
        a = [0] * n
        a[i] = 1
        return cls({(tuple(a), tuple([0] * n)): 1.0}, n)

    def __call__(self, w):
        w = _as_points(w, self.n)
        return np.real(self._p(np.concatenate([w, np.conj(w)], axis=-1)))


class NormPower(UscFunction):
    """``||z||**p``."""

    kind = "norm_power"

    def __init__(self, p: float = 2.0):
        self.p = float(p)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return np.linalg.norm(w, axis=-1) ** self.p


class LogNorm(UscFunction):
    """``ln ||z||`` (``-inf`` at the origin)."""

    kind = "log_norm"

    def __call__(self, w):
        with np.errstate(divide="ignore"):
            return np.log(np.linalg.norm(np.asarray(w, dtype=complex), axis=-1))


class BoundaryData(UscFunction):
    """Continuous data ``phi`` on the sphere of ``D``, equal to ``M`` inside.

    Inside a band of width ``delta`` below the sphere the value blends
    linearly from ``phi`` (at the sphere) to ``M``; outside ``D`` the value at
    the radial projection is used.

    Parameters
    ----------
    phi : callable on points of the sphere
    ball : :class:`Ball`
    M : interior value; defaults to ``max phi + 1`` over sphere samples
    delta : band width; defaults to ``1e-3 * radius``
    """

    kind = "boundary_data"

    def __init__(self, phi, ball: Ball, M: float | None = None, delta: float | None = None,
                 rng=None):
        self.phi = phi
        self.ball = ball
        if M is None:
            rng = rng or np.random.default_rng(0)
            g = rng.standard_normal((4096, ball.dim)) + 1j * rng.standard_normal((4096, ball.dim))
            M = float(np.max(phi(ball.project(ball.c + g)))) + 1.0
        self.M = float(M)
        self.delta = 1e-3 * ball.radius if delta is None else float(delta)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        r = self.ball.rel_radius(w)
        on = self.phi(self.ball.project(w))
        t = np.clip((self.ball.radius - r) / self.delta, 0.0, 1.0)
        return (1 - t) * on + t * self.M


class SmoothedIndicator(UscFunction):
    """``-1`` within ``0.75 eps`` of ``E``, ``0`` beyond ``1.25 eps``, linear between."""

    kind = "smoothed_indicator"

    def __init__(self, E: CompactSet):
        self.E = E

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        shape = w.shape[:-1]
        d = self.E.distance(w.reshape(-1, w.shape[-1])).reshape(shape)
        return -(1.0 - np.clip((d - 0.75 * self.E.eps) / (0.5 * self.E.eps), 0.0, 1.0))


class Constant(UscFunction):
    kind = "constant"

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, w):
        return np.full(np.asarray(w).shape[:-1], self.value)


class Shifted(UscFunction):
    """``phi + constant``."""

    kind = "shifted"

    def __init__(self, phi: UscFunction, shift: float):
        self.phi, self.shift = phi, float(shift)

    def __call__(self, w):
        return self.phi(w) + self.shift


# ---------------------------------------------------------------- disk functional


@dataclass
class FunctionalValue:
    value: float
    renormalized: bool
    warnings: list


def disk_functional(phi, f: AnalyticMap, grid: BoundaryGrid | int = 1024,
                    return_info: bool = False):
    """Boundary average ``(1/2 pi) int phi(f(e^{i theta})) d theta`` (trapezoid rule).

    ``-inf`` samples are dropped and the remaining weights renormalised; more
    than 1% of them triggers a warning.
    """
    vals = np.asarray(phi(f.boundary(grid)), dtype=float)
    finite = np.isfinite(vals)
    warns = []
    if finite.all():
        out = FunctionalValue(float(np.mean(vals)), False, warns)
    else:
        frac = 1 - finite.mean()
        if frac > 0.01:
            warns.append(f"{frac:.2%} of boundary samples are -inf")
            log.warning(warns[-1])
        value = float(np.mean(vals[finite])) if finite.any() else -np.inf
        out = FunctionalValue(value, True, warns)
    return out if return_info else out.value


# ---------------------------------------------------------------- disk family


def _binomial_shift(c: np.ndarray, a: complex) -> np.ndarray:
    """Coefficients in w of sum_k c[:, k] (w - a)^k, k >= 0."""
    n, d1 = c.shape
    out = np.zeros((n, d1), dtype=complex)
    for k in range(d1):
        for j in range(k + 1):
            out[:, j] += c[:, k] * comb(k, j) * (-a) ** (k - j)
    return out


class _Family:
    """Disks ``zeta -> z + sum_{k=1}^d c_k (G_a(zeta) - a)^k``.

    Unknowns: real and imaginary parts of ``c`` then of ``u`` with
    ``a = u / sqrt(1 + |u|^2)``.
    """

    def __init__(self, z, degree, n_grid):
        self.z = z
        self.n = len(z)
        self.d = degree
        self.zeta = BoundaryGrid(n_grid).points
        self.k = np.arange(1, degree + 1)

    @property
    def size(self):
        return 2 * self.n * self.d + 2

    def unpack(self, x):
        m = self.n * self.d
        c = (x[:m] + 1j * x[m:2 * m]).reshape(self.n, self.d)
        u = complex(x[2 * m], x[2 * m + 1])
        a = u / np.sqrt(1 + abs(u) ** 2)
        return c, a

    def pack(self, c, a):
        a = complex(a)
        u = a / np.sqrt(max(1 - abs(a) ** 2, 1e-300))
        return np.concatenate([c.real.ravel(), c.imag.ravel(), [u.real, u.imag]])

    def boundary(self, x, zeta=None):
        c, a = self.unpack(x)
        zeta = self.zeta if zeta is None else zeta
        w = moebius(a, zeta) - a
        return self.z + (w[:, None] ** self.k) @ c.T

    def disk(self, x) -> AnalyticMap:
        c, a = self.unpack(x)
        full = np.concatenate([self.z[:, None], c], axis=1)
        q = Polynomial(_binomial_shift(full, a))
        return q if a == 0 else MoebiusPrecompose(q, a)

    def pad(self, x_old, d_old):
        c, a = _Family(self.z, d_old, 8).unpack(x_old)
        cc = np.zeros((self.n, self.d), dtype=complex)
        cc[:, :d_old] = c
        return self.pack(cc, a)


def _nm(fun, x0, step, maxfev):
    dim = len(x0)
    simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[i] for i in range(dim)])
    res = minimize(fun, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": maxfev, "xatol": 1e-8,
                            "fatol": 1e-12, "adaptive": True})
    return res.x, float(res.fun)


@dataclass
class EnvelopeConfig:
    """Budget of the envelope search.

    Attributes
    ----------
    degrees : degree schedule
    restarts : restarts per degree (the first is a warm start)
    patience : restarts without improvement before moving on
    opt_grid_n : boundary samples inside the optimiser
    grid_n : boundary samples for reported values and containment checks
    maxfev : simplex evaluations per unknown
    penalty : initial containment penalty weight, escalated x10
    escalations : maximal number of penalty escalations
    min_gain : stop escalating the degree when the value improves by less
    proximity : weight of the boundary-proximity term (extremal leaves)
    seed : RNG seed
    """

    degrees: tuple = (1, 2, 4, 8)
    restarts: int = 4
    patience: int = 2
    opt_grid_n: int = 256
    grid_n: int = 2048
    maxfev: int = 100
    penalty: float = 10.0
    escalations: int = 4
    min_gain: float = 1e-5
    proximity: float = 1.0
    seed: int = 0


@dataclass
class EnvelopeResult:
    value: float
    witness: AnalyticMap
    trace: list = field(default_factory=list)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "value": self.value,
                "witness": self.witness.to_dict(), "trace": [list(t) for t in self.trace]}


def _seeds(z, D: Ball, fam: _Family, rng, restart):
    """Starting points: Moebius disk through z, linear disk, random."""
    off = z - D.c
    room = D.radius - np.linalg.norm(off)
    if restart == 0:
        # on C^1 the disk z + R (G_a - a) with a = (z - c)/R is exactly G_a
        # rescaled onto D, whose boundary lies on the sphere
        c = np.zeros((fam.n, fam.d), dtype=complex)
        a = off[0] / D.radius
        if abs(a) > 0.95:
            a *= 0.95 / abs(a)
        c[0, 0] = D.radius if fam.n == 1 else room
        return fam.pack(c, a)
    if restart == 1:
        c = np.zeros((fam.n, fam.d), dtype=complex)
        v = rng.standard_normal(fam.n) + 1j * rng.standard_normal(fam.n)
        c[:, 0] = room * v / np.linalg.norm(v)
        return fam.pack(c, 0)
    c = rng.standard_normal((fam.n, fam.d)) + 1j * rng.standard_normal((fam.n, fam.d))
    # random overall scale, so that plateaus of phi near the sphere are not the only start
    c *= rng.uniform(0.2, 1.0) * room / (np.sqrt(fam.d) * np.linalg.norm(c[:, 0]) + 1e-300)
    a = 0.5 * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
    if abs(a) > 0.9:
        a = 0.9 * a / abs(a)
    return fam.pack(c, a)


def _shrink_into(disk_x, fam: _Family, D: Ball, grid_n):
    """Largest s in [0, 1] with z + s (f - z) inside the closed ball."""
    zeta = BoundaryGrid(grid_n).points
    b = fam.boundary(disk_x, zeta)
    if np.all(D.rel_radius(b) <= D.radius):
        return disk_x
    lo, hi = 0.0, 1.0
    for _ in range(60):
        s = 0.5 * (lo + hi)
        if np.all(D.rel_radius(fam.z + s * (b - fam.z)) <= D.radius):
            lo = s
        else:
            hi = s
    c, a = fam.unpack(disk_x)
    return fam.pack(lo * c, a)


def _optimise(phi, z, D: Ball, cfg: EnvelopeConfig, proximity: float = 0.0, rng_tag: int = 0):
    """Core search; returns (value, x, family, trace) with containment enforced."""
    n = len(z)
    const_val = float(phi(z[None, :])[0])
    best = (const_val, None, None)
    trace = [(0, const_val)]
    prev_level = const_val
    for degree in cfg.degrees:
        fam = _Family(z, degree, cfg.opt_grid_n)
        level_best, stale = np.inf, 0
        for restart in range(cfg.restarts):
            if stale >= cfg.patience:
                break
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, rng_tag, degree, restart]))
            if restart == 0 and best[1] is not None and best[2].d < degree:
                x = fam.pad(best[1], best[2].d)
            else:
                x = _seeds(z, D, fam, rng, restart)
            x0 = _shrink_into(x, fam, D, cfg.grid_n)
            val0 = disk_functional(phi, fam.disk(x0), cfg.grid_n)
            lam = cfg.penalty
            for _ in range(cfg.escalations + 1):
                def obj(y, lam=lam):
                    b = fam.boundary(y)
                    r = D.rel_radius(b)
                    vals = phi(b)
                    vals = np.where(np.isfinite(vals), vals, -1e3)
                    out = np.mean(vals)
                    out += lam * np.mean(np.maximum(r - D.radius, 0.0) ** 2) / D.radius**2
                    if proximity:
                        out += proximity * np.mean(((D.radius - r) / D.radius) ** 2)
                    return out

                x, _ = _nm(obj, x, 0.1 * D.radius / degree, cfg.maxfev * fam.size)
                r = D.rel_radius(fam.boundary(x, BoundaryGrid(cfg.grid_n).points))
                if np.all(r <= D.radius):
                    break
                lam *= 10
            x = _shrink_into(x, fam, D, cfg.grid_n)
            val = disk_functional(phi, fam.disk(x), cfg.grid_n)
            if val0 < val:
                # the search never discards its own starting disk
                x, val = x0, val0
            trace.append((degree, val))
            stale = stale + 1 if val >= level_best - cfg.min_gain else 0
            level_best = min(level_best, val)
            if val < best[0]:
                best = (val, x, fam)
        if prev_level - best[0] < cfg.min_gain and best[1] is not None and degree > cfg.degrees[0]:
            break
        prev_level = best[0]
    return best, trace


def poletsky_value(phi, z, D: Ball, cfg: EnvelopeConfig | None = None) -> EnvelopeResult:
    """Upper bound of the envelope ``P(phi)(z)`` with its witness disk.

    The constant disk is tried first, so the value never exceeds ``phi(z)``.
    """
    cfg = cfg or EnvelopeConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != D.dim:
        raise ParameterError("z and the ball live in different dimensions")
    if not D.contains(z[None, :])[0]:
        raise ParameterError("z must lie in the ambient ball")
    (val, x, fam), trace = _optimise(phi, z, D, cfg)
    witness = Polynomial.constant(z) if x is None else fam.disk(x)
    return EnvelopeResult(float(val), witness, trace)


def envelope_sweep(phi, points, D: Ball, cfg: EnvelopeConfig | None = None):
    """Envelope values on a point set; returns (csv text, witnesses)."""
    cfg = cfg or EnvelopeConfig()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = D.dim
    w.writerow([f"{p}_z{i + 1}" for i in range(n) for p in ("re", "im")] + ["value", "witness_id"])
    witnesses = []
    for k, z in enumerate(np.atleast_2d(np.asarray(points, dtype=complex))):
        res = poletsky_value(phi, z, D, cfg)
        witnesses.append(res.witness)
        w.writerow([repr(float(v)) for c in z for v in (c.real, c.imag)] + [repr(res.value), k])
    return buf.getvalue(), witnesses


# ---------------------------------------------------------------- psh probe


@dataclass
class ProbeReport:
    checks: int
    violations: list
    tol: float

    @property
    def rate(self) -> float:
        return len(self.violations) / self.checks if self.checks else 0.0

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "checks": self.checks, "tol": self.tol,
                "violations": self.violations}


def psh_probe(u, points, rng, lines: int = 4, radii=(0.05, 0.1), n_theta: int = 16,
              tol: float = 1e-2) -> ProbeReport:
    """Sub-mean-value test of ``u`` along random complex lines.

    For each point ``z``, unit direction ``xi`` and radius ``rho`` checks
    ``u(z) <= mean_theta u(z + rho e^{i theta} xi) + tol``.  ``u`` takes an
    array of points (..., n).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    n = pts.shape[1]
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    ring = np.exp(1j * theta)
    violations, checks = [], 0
    for i, z in enumerate(pts):
        uz = float(np.asarray(u(z[None, :])).ravel()[0])
        for _ in range(lines):
            xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            xi /= np.linalg.norm(xi)
            for rho in radii:
                circle = z + rho * ring[:, None] * xi
                mean = float(np.mean(u(circle)))
                checks += 1
                if uz > mean + tol:
                    violations.append({"point": i, "radius": float(rho), "excess": uz - mean,
                                       "direction": [[c.real, c.imag] for c in xi]})
    return ProbeReport(checks, violations, tol)


def cached_envelope(phi, D: Ball, cfg: EnvelopeConfig | None = None):
    """``u(points)`` evaluating :func:`poletsky_value` pointwise, memoised."""
    cache = {}

    def u(points):
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        out = np.empty(pts.shape[:-1])
        for idx in np.ndindex(*pts.shape[:-1]):
            key = tuple(np.round(pts[idx], 14))
            if key not in cache:
                cache[key] = poletsky_value(phi, pts[idx], D, cfg).value
            out[idx] = cache[key]
        return out

    return u


# ---------------------------------------------------------------- extremal leaves


def extremal_leaf(phi, z, D: Ball, cfg: EnvelopeConfig | None = None, J: int = 8) -> FiniteLeaf:
    """``J`` near-optimal disks from independent restarts, sorted by value.

    Each restart adds a boundary-proximity term that pulls boundary samples
    towards the sphere of ``D``.  The constant disk is a candidate too, so a
    constant ``phi`` returns it first.  ``leaf.diagnostics`` records each
    member's value and the mean distance of its boundary to the sphere.
    """
    cfg = cfg or EnvelopeConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    cands = [(float(phi(z[None, :])[0]), -1, Polynomial.constant(z))]
    for j in range(J):
        (val, x, fam), _ = _optimise(phi, z, D, cfg, proximity=cfg.proximity, rng_tag=1000 + j)
        if x is None:
            continue
        disk = fam.disk(x)
        cands.append((disk_functional(phi, disk, cfg.grid_n), j, disk))
    cands.sort(key=lambda t: (round(t[0], 9), t[1]))
    members = [c[2] for c in cands[:J]]
    R = D.radius + float(np.linalg.norm(D.c))
    leaf = FiniteLeaf(members, R)
    gaps = [float(np.mean(D.radius - D.rel_radius(m.boundary(cfg.grid_n)))) for m in members]
    leaf.diagnostics = {"values": [c[0] for c in cands[:J]], "support_distance": gaps}
    return leaf


# ---------------------------------------------------------------- maximality


def default_probe_dictionary(n: int, count: int, rng, center=None,
                             scales=(0.0, 0.25, 0.5, 1.0)) -> list:
    """Quadratics ``s ||z - center||^2`` plus random Bremermann probes.

    Every entry is plurisubharmonic; the checker also uses their negatives.
    """
    center = np.zeros(n, dtype=complex) if center is None else np.asarray(center, dtype=complex)
    probes = []
    for s in scales:
        probes.append(lambda w, s=s: s * np.linalg.norm(np.asarray(w) - center, axis=-1) ** 2)
    probes += random_bremermann(n, max(count - len(probes), 0), rng)
    return probes[:count]


@dataclass
class MaximalityReport:
    status: str
    violations: list
    band_samples: int
    interior_samples: int
    probes: int
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "status": self.status,
                "violations": self.violations, "band_samples": self.band_samples,
                "interior_samples": self.interior_samples, "probes": self.probes,
                "warnings": list(self.warnings)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def maximality_check(u, leaf: FiniteLeaf, G_radius: float, H_radius: float, probes,
                     tol: float = 1e-6, band: float | None = None, per_member: int = 128,
                     interior_radii=None, center=None) -> MaximalityReport:
    """Comparison test of maximality of ``u`` on the cluster of ``leaf``.

    With ``G = B(z_L, G_radius)``, each psh probe ``v`` is shifted by a
    constant so that ``v <= u`` on cluster samples in the band around the
    sphere of ``G`` with equality at one sample; a sample inside ``G`` with
    ``v > u + tol`` is a violation.  Negated probes are used the same way
    with the inequalities reversed.  Only samples within ``H_radius`` of the
    center are used.  Finding no violation is evidence, not proof.
    """
    if not 0 < G_radius < H_radius:
        raise ParameterError("need 0 < G_radius < H_radius")
    probes = list(probes)
    warns = []
    if not probes:
        warns.append("empty probe dictionary: vacuous pass")
        log.warning(warns[-1])
        return MaximalityReport("pass", [], 0, 0, 0, warns)
    sample = cluster_sample(leaf, per_member, interior_radii)
    pts = sample.points
    c = leaf.center() if center is None else np.asarray(center, dtype=complex)
    r = np.linalg.norm(pts - c, axis=1)
    band = 0.05 * G_radius if band is None else band
    in_h = r < H_radius
    on_band = in_h & (np.abs(r - G_radius) <= band)
    inside = in_h & (r < G_radius - band)
    nb, ni = int(on_band.sum()), int(inside.sum())
    if nb == 0 or ni == 0:
        warns.append("no cluster samples on the band around the sphere of G or inside G")
        return MaximalityReport("inconclusive", [], nb, ni, len(probes), warns)
    ub, ui = np.asarray(u(pts[on_band]), float), np.asarray(u(pts[inside]), float)
    violations = []
    for k, v in enumerate(probes):
        vb = np.asarray(v(pts[on_band]), float)
        vi = np.asarray(v(pts[inside]), float)
        for kind, sign in (("psh", 1.0), ("plurisuperharmonic", -1.0)):
            # psh: want v <= u; superharmonic: want -v >= u, i.e. u + v <= 0
            if sign > 0:
                gap_b, gap_i = vb - ub, vi - ui
            else:
                gap_b, gap_i = ub + vb, ui + vi
            fin = np.isfinite(gap_b)
            if not fin.any():
                continue
            shift = np.max(gap_b[fin])
            excess = gap_i - shift
            excess = np.where(np.isfinite(excess), excess, -np.inf)
            j = int(np.argmax(excess))
            if excess[j] > tol:
                p = pts[inside][j]
                violations.append({"probe": k, "kind": kind, "margin": float(excess[j]),
                                   "point": [[x.real, x.imag] for x in p]})
    return MaximalityReport("violation" if violations else "pass", violations, nb, ni, len(probes), warns)


__all__ = [
    "Ball", "BoundaryData", "Constant", "EnvelopeConfig", "EnvelopeResult", "LogNorm",
    "MaximalityReport", "NormPower", "PolyZZbar", "Shifted",
    "SmoothedIndicator", "UscFunction", "cached_envelope", "default_probe_dictionary",
    "disk_functional", "envelope_sweep", "extremal_leaf", "maximality_check",
    "poletsky_value", "psh_probe",
]
