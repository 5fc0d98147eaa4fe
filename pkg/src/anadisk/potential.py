"""Harmonic measure on the unit disk and related potential-theoretic bounds.

Arc harmonic measure has the Poisson closed form.  Harmonic measure of an
interior target (the chance that Brownian motion from ``zeta`` hits the
target before leaving the disk) is estimated by walk on spheres: every step
jumps to a uniform point on the largest circle that avoids both the unit
circle and the target, and the walk is absorbed within ``eps_abs`` of either.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .disk import AnalyticMap, BoundaryGrid, Polynomial, bloch_norm_of_derivative, lipschitz_bound
from .errors import DegenerateGeometryError, DomainError, ParameterError

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
CHUNK = 4096
SCHEMA_VERSION = 1


# ---------------------------------------------------------------- arcs


class ArcSet:
    """Disjoint arcs ``[start, end)`` on the unit circle, angles in radians.

    Arcs are normalised so that ``0 <= start < 2 pi`` and
    ``start < end <= start + 2 pi``; an arc of length ``2 pi`` is the full circle.
    """

    def __init__(self, arcs):
        norm = []
        for a, b in arcs:
            a, b = float(a), float(b)
            length = b - a
            if not 0 < length <= TWO_PI + 1e-15:
                raise ParameterError(f"arc [{a}, {b}) must have length in (0, 2 pi]")
            start = a % TWO_PI
            norm.append((start, start + min(length, TWO_PI)))
        norm.sort()
        total = sum(b - a for a, b in norm)
        if total > TWO_PI + 1e-12:
            raise ParameterError("arcs overlap: total length exceeds 2 pi")
        for (a0, b0), (a1, _) in zip(norm, norm[1:]):
            if a1 < b0 - 1e-15:
                raise ParameterError("arcs overlap")
        if len(norm) > 1 and norm[-1][1] - TWO_PI > norm[0][0] + 1e-15:
            raise ParameterError("arcs overlap across angle 0")
        self.arcs = tuple(norm)

    @classmethod
    def full(cls):
        return cls([(0.0, TWO_PI)])

    @property
    def total_length(self) -> float:
        return float(sum(b - a for a, b in self.arcs))

    def rotated(self, phi: float) -> "ArcSet":
        return ArcSet([(a + phi, b + phi) for a, b in self.arcs])

    def contains_angle(self, theta) -> np.ndarray:
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        out = np.zeros(theta.shape, dtype=bool)
        for a, b in self.arcs:
            out |= np.mod(theta - a, TWO_PI) < (b - a)
            if b - a >= TWO_PI:
                out[:] = True
        return out


def _arc_poisson(z, a, b):
    """Poisson integral of the indicator of the arc from angle a to b at z."""
    length = b - a
    if length >= TWO_PI:
        return np.ones(np.shape(z))
    ea, eb = np.exp(1j * a), np.exp(1j * b)
    # angle under which the chord is seen from z, counterclockwise from ea to eb
    seen = np.mod(np.angle(eb - z) - np.angle(ea - z), TWO_PI)
    return seen / np.pi - length / TWO_PI


def harmonic_measure_arc(zeta, arcs: ArcSet) -> float:
    """Harmonic measure of ``arcs`` at ``zeta`` in the unit disk (Poisson integral).

    Uses the inscribed-angle identity ``omega = Theta / pi - |arc| / (2 pi)``
    where ``Theta`` is the angle subtended by the arc at ``zeta``.
    """
    z = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("harmonic_measure_arc needs |zeta| < 1")
    val = sum(_arc_poisson(z, a, b) for a, b in arcs.arcs)
    val = np.clip(val, 0.0, 1.0)
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------- walks


@dataclass(frozen=True)
class WalkConfig:
    """Walk-on-spheres settings.

    ``max_step`` caps the jump radius; it only matters for targets that are
    plain predicates without a distance function.
    """

    walks: int = 100_000
    eps_abs: float = 1e-4
    max_steps: int = 10_000
    seed: int = 0
    max_step: float = 0.01

    def __post_init__(self):
        if self.walks < 1:
            raise ParameterError("walks must be positive")
        if not 1e-6 < self.eps_abs < 1e-2:
            raise ParameterError("eps_abs must lie in (1e-6, 1e-2)")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be positive")
        if not self.max_step > 0:
            raise ParameterError("max_step must be positive")


@dataclass
class HarmonicEstimate:
    """Monte-Carlo estimate with a 95% binomial confidence radius."""

    estimate: float
    ci95: float
    walks: int
    hits: int
    exhausted: int = 0
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "estimate": self.estimate,
            "ci95": self.ci95,
            "walks": self.walks,
            "hits": self.hits,
            "exhausted": self.exhausted,
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _estimate(hits, walks, exhausted):
    p = hits / walks
    ci = 1.96 * np.sqrt(p * (1 - p) / walks)
    warns = []
    if walks < 1000:
        warns.append(f"only {walks} walks; at least 1000 are needed for a reported estimate")
    if exhausted > 0.01 * walks:
        warns.append(f"{exhausted} of {walks} walks exhausted max_steps")
    for w in warns:
        log.warning(w)
    return HarmonicEstimate(float(p), float(ci), int(walks), int(hits), int(exhausted), warns)


class DiskTarget:
    """Open disk ``B(center, radius)`` in the parameter plane."""

    def __init__(self, center, radius):
        if not radius > 0:
            raise ParameterError("target radius must be positive")
        self.center = complex(center)
        self.radius = float(radius)

    def distance(self, zeta):
        return np.abs(zeta - self.center) - self.radius

    def contains(self, zeta):
        return self.distance(zeta) < 0


class EmptyTarget:
    def distance(self, zeta):
        return np.full(np.shape(zeta), np.inf)

    def contains(self, zeta):
        return np.zeros(np.shape(zeta), dtype=bool)


def _poly_local_lipschitz(p: Polynomial):
    """s -> sup of ||p'|| over |zeta| <= s, from the coefficient moduli."""
    d = p.coeffs.shape[1]
    if d == 1:
        return lambda s: np.zeros(np.shape(s))
    k = np.arange(1, d)
    w = np.abs(p.coeffs[:, 1:]) * k

    def lip(s):
        s = np.asarray(s, dtype=float)
        powers = s[..., None] ** (k - 1)
        return np.linalg.norm(powers @ w.T, axis=-1)

    return lip


class PreimageBall:
    """The open set ``f^{-1}(B(z, r))`` inside the unit disk.

    ``distance`` returns a lower bound of the distance to the set: if
    ``||f(zeta) - z|| = r + gap`` then no point closer than ``gap / L`` can lie
    in the preimage, where ``L`` bounds ``||f'||`` on the disk around ``zeta``.
    For polynomial maps ``L`` is evaluated on the smallest centred disk that
    contains the step, which keeps steps large near the origin.
    """

    def __init__(self, f: AnalyticMap, center, radius):
        if not radius > 0:
            raise ParameterError("ball radius must be positive")
        self.f = f
        self.center = np.atleast_1d(np.asarray(center, dtype=complex))
        self.radius = float(radius)
        if isinstance(f, Polynomial):
            self._lip = _poly_local_lipschitz(f)
        else:
            L = lipschitz_bound(f)
            self._lip = lambda s: np.full(np.shape(s), L)

    def _gap(self, zeta):
        return np.linalg.norm(self.f(zeta) - self.center, axis=-1) - self.radius

    def contains(self, zeta):
        return self._gap(zeta) < 0

    def distance(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        gap = self._gap(zeta)
        mod = np.abs(zeta)
        lip_all = self._lip(np.ones_like(mod))
        with np.errstate(divide="ignore", invalid="ignore"):
            best = np.where(lip_all > 0, gap / lip_all, np.inf)
            # try larger radii rho with rho * L(|zeta| + rho) <= gap
            for scale in (64.0, 16.0, 4.0):
                rho = np.minimum(best * scale, 1 - mod)
                ok = rho * self._lip(np.minimum(mod + rho, 1.0)) <= gap
                best = np.where(ok & (rho > best), rho, best)
        return np.where(gap <= 0, gap, best)


def _walk_chunk(starts, targets, cfg, rng):
    """Walk a batch of starting points against nested targets.

    ``targets`` are ordered from largest to smallest set, each contained in
    the previous one.  A walk is first run against the largest set; on
    absorption it records a hit and keeps walking against the next one.
    Because Brownian paths reach a nested set only through the sets around
    it, hit counts are pathwise monotone.
    Returns (hits per target, number of exhausted walks).
    """
    n = len(starts)
    pos = starts.astype(complex).copy()
    level = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    hits = np.zeros(len(targets), dtype=int)
    steps = 0
    while active.any() and steps < cfg.max_steps:
        idx = np.nonzero(active)[0]
        x = pos[idx]
        lv = level[idx]
        d_b = 1 - np.abs(x)
        d_t = np.empty(len(idx))
        step_cap = np.full(len(idx), np.inf)
        for k, t in enumerate(targets):
            sel = lv == k
            if not sel.any():
                continue
            if hasattr(t, "distance"):
                d_t[sel] = t.distance(x[sel])
            else:
                d_t[sel] = np.where(t(x[sel]), -1.0, np.inf)
                step_cap[sel] = cfg.max_step
        # absorption in the current target; walks may cascade through levels
        absorbed = d_t < cfg.eps_abs
        while absorbed.any():
            which = idx[absorbed]
            np.add.at(hits, level[which], 1)
            level[which] += 1
            done = level[which] >= len(targets)
            active[which[done]] = False
            lv = level[idx]
            recheck = absorbed & (lv < len(targets))
            new_abs = np.zeros(len(idx), dtype=bool)
            for k, t in enumerate(targets):
                sel = recheck & (lv == k)
                if not sel.any():
                    continue
                if hasattr(t, "distance"):
                    d_t[sel] = t.distance(x[sel])
                else:
                    d_t[sel] = np.where(t(x[sel]), -1.0, np.inf)
                new_abs[sel] = d_t[sel] < cfg.eps_abs
            absorbed = new_abs
        out = d_b < cfg.eps_abs
        active[idx[out]] = False
        go = active[idx]
        if not go.any():
            break
        radius = np.minimum(np.minimum(d_b, d_t), step_cap)[go]
        phi = rng.uniform(0.0, TWO_PI, size=int(go.sum()))
        pos[idx[go]] = x[go] + radius * np.exp(1j * phi)
        steps += 1
    return hits, int(active.sum())


def _run_walks(zeta, targets, cfg):
    zeta = complex(zeta)
    if abs(zeta) >= 1:
        raise DomainError("walks must start inside the unit disk")
    hits = np.zeros(len(targets), dtype=int)
    exhausted = 0
    for chunk, start in enumerate(range(0, cfg.walks, CHUNK)):
        n = min(CHUNK, cfg.walks - start)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed & (2**64 - 1), chunk]))
        h, e = _walk_chunk(np.full(n, zeta), targets, cfg, rng)
        hits += h
        exhausted += e
    return hits, exhausted


def harmonic_measure_interior(zeta, hit, cfg: WalkConfig | None = None) -> HarmonicEstimate:
    """Probability that Brownian motion from ``zeta`` enters ``hit`` before
    leaving the unit disk.

    Parameters
    ----------
    zeta : start point, ``|zeta| < 1``
    hit : target set.  Either an object with ``distance`` (a lower bound of
        the distance to the set, negative inside) or a boolean predicate; for
        a bare predicate the jump radius is capped at ``cfg.max_step`` and the
        estimate is biased low.
    cfg : :class:`WalkConfig`
    """
    cfg = cfg or WalkConfig()
    hits, exhausted = _run_walks(zeta, [hit], cfg)
    return _estimate(int(hits[0]), cfg.walks, exhausted)


def harmonic_measure_nested(zeta, targets, cfg: WalkConfig | None = None) -> list[HarmonicEstimate]:
    """Estimates for a decreasing chain of targets from one set of walks.

    ``targets[0]`` must contain ``targets[1]`` and so on.  The estimates are
    nonincreasing along the chain exactly, not only in expectation.
    """
    cfg = cfg or WalkConfig()
    if not targets:
        return []
    hits, exhausted = _run_walks(zeta, list(targets), cfg)
    return [_estimate(int(h), cfg.walks, exhausted) for h in hits]


def harmonic_measure_arc_mc(zeta, arcs: ArcSet, cfg: WalkConfig | None = None) -> HarmonicEstimate:
    """Monte-Carlo counterpart of :func:`harmonic_measure_arc`: the exit point
    of each walk is projected to the circle and tested against the arcs."""
    cfg = cfg or WalkConfig()
    zeta = complex(zeta)
    if abs(zeta) >= 1:
        raise DomainError("walks must start inside the unit disk")
    hits = exhausted = 0
    for chunk, start in enumerate(range(0, cfg.walks, CHUNK)):
        n = min(CHUNK, cfg.walks - start)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed & (2**64 - 1), chunk]))
        pos = np.full(n, zeta)
        active = np.ones(n, dtype=bool)
        for _ in range(cfg.max_steps):
            d_b = 1 - np.abs(pos[active])
            idx = np.nonzero(active)[0]
            done = d_b < cfg.eps_abs
            active[idx[done]] = False
            if not active.any():
                break
            idx = idx[~done]
            phi = rng.uniform(0.0, TWO_PI, size=len(idx))
            pos[idx] += d_b[~done] * np.exp(1j * phi)
        exhausted += int(active.sum())
        hits += int(np.sum(arcs.contains_angle(np.angle(pos[~active]))))
    return _estimate(hits, cfg.walks, exhausted)


# ---------------------------------------------------------------- formulas


def two_constant_bound(m: float, M: float, d: float) -> float:
    """``m**d * M**(1 - d)``: the bound on ``|h|`` at a point where the set
    with ``|h| <= m`` has harmonic measure ``d`` and ``|h| <= M`` overall."""
    if not (m > 0 and M > 0):
        raise ParameterError("two-constant bound needs positive m and M")
    if m > M:
        raise ParameterError(f"m = {m} exceeds M = {M}")
    if not 0 <= d <= 1:
        raise ParameterError("d must lie in [0, 1]")
    return float(m**d * M ** (1 - d))


@dataclass(frozen=True)
class Lemma42Inputs:
    """Geometry of the quantitative escape estimate.

    ``f`` maps into ``B(0, R)``, its center has norm ``b``, and the preimage
    of ``B(0, r)`` has harmonic measure ``a`` at 0; ``k > 1`` with ``k r < b``.
    """

    k: float
    r: float
    R: float
    a: float
    b: float

    def __post_init__(self):
        if not self.k > 1:
            raise ParameterError("k must exceed 1")
        if not (self.r > 0 and self.R > 0):
            raise ParameterError("r and R must be positive")
        if not 0 < self.a <= 1:
            raise ParameterError("a must lie in (0, 1]")
        if not self.b > 0:
            raise ParameterError("b must be positive")

    def check_regime(self):
        if not self.b < self.R:
            raise DegenerateGeometryError(f"need b < R, got b = {self.b}, R = {self.R}")
        if not self.k * self.r < self.b:
            raise DegenerateGeometryError(f"need k r < b, got k r = {self.k * self.r}, b = {self.b}")


@dataclass(frozen=True)
class Lemma42Constants:
    s: float
    m: float
    t: float
    c: float


def lemma42_constants(inp: Lemma42Inputs) -> Lemma42Constants:
    """Constants of the escape estimate.

    ``2 s = a ln(kr/R) / ln(b/R)``, ``m = k**((1 - s)/2)``,
    ``t = (1 - s) ln k / (2 ln(R/(kr)))`` and ``c = min(s, t)``.

    Raises
    ------
    DegenerateGeometryError
        If the ordering ``k r < b < R`` fails or ``s`` leaves ``(0, 1)``.
    """
    inp.check_regime()
    k, r, R, a, b = inp.k, inp.r, inp.R, inp.a, inp.b
    s = 0.5 * a * np.log(k * r / R) / np.log(b / R)
    if not 0 < s < 1:
        raise DegenerateGeometryError(f"s = {s:.6g} is outside (0, 1); inputs are out of regime")
    m = k ** ((1 - s) / 2)
    t = (1 - s) * np.log(k) / (2 * np.log(R / (k * r)))
    if not t > 0:
        raise DegenerateGeometryError(f"t = {t:.6g} is not positive")
    return Lemma42Constants(float(s), float(m), float(t), float(min(s, t)))


def lemma42_consistency(inp: Lemma42Inputs, const: Lemma42Constants | None = None) -> dict:
    """Re-evaluate the inequalities behind the constants.

    Returns a dict of named booleans:

    ``q_bound``
        ``a ln(mr/R)/ln(b/R) >= 2 s``, the lower bound on the maximum of the
        harmonic measure over the preimage of the sphere of radius ``m r``.
    ``m_range``
        ``1 < m < k``.
    ``t_identity``
        ``t = ((1 - s) ln k - ln m) / ln(R/(kr))``.
    ``c_positive``
        ``c > 0``.
    """
    const = const or lemma42_constants(inp)
    k, r, R, a, b = inp.k, inp.r, inp.R, inp.a, inp.b
    s, m, t, c = const.s, const.m, const.t, const.c
    q = a * np.log(m * r / R) / np.log(b / R)
    t_alt = ((1 - s) * np.log(k) - np.log(m)) / np.log(R / (k * r))
    return {
        "q_bound": bool(q >= 2 * s * (1 - 1e-12)),
        "m_range": bool(1 < m < k),
        "t_identity": bool(abs(t - t_alt) <= 1e-12 * max(1.0, abs(t))),
        "c_positive": bool(c > 0),
    }


# ---------------------------------------------------------------- Bloch criterion


def _longest_run(mask: np.ndarray) -> int:
    """Longest circular run of True values."""
    if mask.all():
        return len(mask)
    if not mask.any():
        return 0
    k = int(np.argmin(mask))
    m = np.roll(mask, -k)
    best = run = 0
    for v in m:
        run = run + 1 if v else 0
        best = max(best, run)
    return best


@dataclass
class BlochDiagnosis:
    passed: bool
    threshold: float
    hypotheses: dict
    members: list
    failure: str | None = None

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "diagnosis": "PASS" if self.passed else "FAIL",
            "threshold": self.threshold,
            "hypotheses": self.hypotheses,
            "members": self.members,
            "failure": self.failure,
        }


def bloch_criterion(leaf, h, M: float, b: float, alpha: float, c: float = 0.1,
                    grid: BoundaryGrid | int = 4096, radii=None, angles=None,
                    lattice=(64, 128)) -> BlochDiagnosis:
    """Sample the hypotheses that force a univalent disk in the cluster.

    Parameters
    ----------
    leaf : object with ``members`` (a list of disks)
    h : :class:`~anadisk.polynomial.MultiPoly` on the ambient space
    M : bound for ``|h|`` and ``||grad h||`` near the cluster
    b : bound for ``|h(z_L)|``, must be below 1
    alpha : minimal length of a boundary arc where ``|h o f_j| >= 1``
    c : Bloch constant; the per-coordinate threshold is ``c / (n M)``

    Notes
    -----
    The hypotheses are checked on samples only: on a polar lattice of each
    member for the bounds on ``h`` and on the boundary grid for the arc.
    """
    if not b < 1:
        raise ParameterError("b must be below 1")
    if not isinstance(grid, BoundaryGrid):
        grid = BoundaryGrid(int(grid))
    members = list(leaf.members)
    n = members[0].dim
    thr = c / (n * M)
    nr, nt = lattice
    lat = (np.linspace(0, 1, nr)[:, None] * np.exp(1j * TWO_PI * np.arange(nt) / nt)[None, :]).ravel()
    z_l = np.mean([f.center() for f in members], axis=0)
    hyp = {"bounded": True, "center": True, "arcs": True}
    failure = None
    hz = abs(complex(h(z_l[None, :])[0]))
    if hz > b:
        hyp["center"] = False
        failure = f"|h(z_L)| = {hz:.6g} exceeds b = {b}"
    rows = []
    for j, f in enumerate(members):
        pts = f(lat)
        hv = np.abs(h(pts))
        gv = np.linalg.norm(h.gradient(pts), axis=-1)
        if hyp["bounded"] and (hv.max() >= M or gv.max() >= M):
            hyp["bounded"] = False
            k = int(np.argmax(np.maximum(hv, gv)))
            failure = failure or f"member {j}: |h| or |grad h| reaches {max(hv[k], gv[k]):.6g} >= M at zeta = {lat[k]}"
        bnd = np.abs(h(f.boundary(grid)))
        arc = TWO_PI * _longest_run(bnd >= 1 - 1e-9) / grid.n
        if hyp["arcs"] and not arc > alpha:
            hyp["arcs"] = False
            failure = failure or f"member {j}: longest arc with |h o f| >= 1 has length {arc:.6g} <= {alpha}"

        def dhf(z, f=f):
            return np.sum(h.gradient(f(z)) * f.derivative(z), axis=-1)

        bh, wh = bloch_norm_of_derivative(dhf, radii, angles, return_witness=True)
        coord = []
        for k in range(n):
            bk, wk = bloch_norm_of_derivative(lambda z, k=k, f=f: f.derivative(z)[..., k], radii, angles,
                                              return_witness=True)
            coord.append((bk, wk))
        kbest = int(np.argmax([v for v, _ in coord]))
        rows.append({
            "member": j,
            "bloch_h_f": bh,
            "witness_h_f": [wh.real, wh.imag],
            "arc_length": arc,
            "best_coordinate": kbest,
            "coordinate_bloch": [v for v, _ in coord],
            "witness": [coord[kbest][1].real, coord[kbest][1].imag],
        })
    low = [r for r in rows if max(r["coordinate_bloch"]) < thr]
    passed = all(hyp.values()) and not low
    if failure is None and low:
        failure = f"member {low[0]['member']}: coordinate Bloch norms below {thr:.6g}"
    return BlochDiagnosis(passed, thr, hyp, rows, failure)

