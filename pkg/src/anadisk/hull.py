"""Polynomial hull membership: disk evidence one way, separating polynomials the other.

A point ``z`` lies in the polynomial hull of a compact ``K`` exactly when
there are centred disks ``f(0) = z`` whose boundaries spend almost all their
time in any neighbourhood of ``K``.  Outside the hull some polynomial is
larger at ``z`` than anywhere on ``K``.  Both searches are one-sided, so the
classifier returns Unknown when neither finds a certificate.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .disk import AnalyticMap, BoundaryGrid, Polynomial, from_dict
from .errors import ParameterError
from .polynomial import MultiPoly, monomial_exponents

SCHEMA_VERSION = 1
DELTA_NORM = 1e-9


def _realify(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


class CompactSet:
    """Sample cloud of a compact ``K`` in C^n with a neighbourhood radius.

    Parameters
    ----------
    samples : (m, n) complex array, or (m,) for n = 1
    eps : radius of the neighbourhood ``{dist(., K) < eps}``; defaults to
        ``0.02 * diam(K)`` (or 0.02 for a single point)
    """

    def __init__(self, samples, eps: float | None = None):
        pts = np.asarray(samples, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        if len(pts) == 0:
            raise ParameterError("a compact set needs at least one sample")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("non-finite sample")
        pts = pts.copy()
        pts.setflags(write=False)
        self.samples = pts
        self._tree = cKDTree(_realify(pts))
        self.diam = self._diameter()
        if eps is None:
            eps = 0.02 * (self.diam if self.diam > 0 else 1.0)
        if not eps > 0:
            raise ParameterError("neighbourhood radius must be positive")
        self.eps = float(eps)

    def _diameter(self) -> float:
        pts = self.samples
        if len(pts) > 2000:
            pts = pts[np.linspace(0, len(pts) - 1, 2000).astype(int)]
        # large clouds are thinned; the value only feeds defaults
        r = _realify(pts)
        return float(pdist(r).max()) if len(r) > 1 else 0.0

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def with_eps(self, eps: float) -> "CompactSet":
        out = object.__new__(CompactSet)
        out.samples, out._tree, out.diam = self.samples, self._tree, self.diam
        if not eps > 0:
            raise ParameterError("neighbourhood radius must be positive")
        out.eps = float(eps)
        return out

    def distance(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1 and self.dim == 1:
            pts = pts[:, None]
        d, _ = self._tree.query(_realify(pts))
        return d

    def sup_abs(self, p: MultiPoly) -> float:
        return float(np.max(np.abs(p(self.samples))))

    # factories for the regression corpus
    @classmethod
    def circle(cls, m: int = 2048, radius: float = 1.0, eps=None):
        return cls(radius * np.exp(2j * np.pi * np.arange(m) / m), eps)

    @classmethod
    def torus(cls, m: int = 128, eps=None):
        t = np.exp(2j * np.pi * np.arange(m) / m)
        a, b = np.meshgrid(t, t, indexing="ij")
        return cls(np.stack([a.ravel(), b.ravel()], axis=1), eps)

    @classmethod
    def segment(cls, a=-1.0, b=1.0, m: int = 2001, eps=None):
        return cls(np.linspace(a, b, m).astype(complex), eps)

    @classmethod
    def points(cls, pts, eps=None):
        return cls(np.asarray(pts, dtype=complex), eps)

    @classmethod
    def sphere(cls, n: int, m: int, rng, radius: float = 1.0, eps=None):
        g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return cls(radius * g, eps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"{p}_z{i + 1}" for i in range(self.dim) for p in ("re", "im")])
        for p in self.samples:
            w.writerow([repr(float(v)) for c in p for v in (c.real, c.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, eps=None) -> "CompactSet":
        """Read 2n real columns (re, im per coordinate); a header row is skipped."""
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        try:
            [float(x) for x in rows[0]]
        except ValueError:
            rows = rows[1:]
        data = np.array([[float(x) for x in r] for r in rows])
        if data.ndim != 2 or data.shape[1] % 2:
            raise ParameterError("compact-set CSV needs an even number of real columns")
        return cls(data[:, 0::2] + 1j * data[:, 1::2], eps)


def outside_fraction(disk: AnalyticMap, K: CompactSet, grid: BoundaryGrid | int = 1024,
                     eps: float | None = None) -> float:
    """Fraction of boundary samples at distance >= eps from K."""
    eps = K.eps if eps is None else eps
    return float(np.mean(K.distance(disk.boundary(grid)) >= eps))


@dataclass
class HullConfig:
    """Search budgets.

    Attributes
    ----------
    degrees : degree schedule of the disk search
    restarts : random restarts per degree
    patience : restarts without improvement after which a degree is abandoned
    eps_factors : continuation of the neighbourhood radius, as multiples of
        ``K.eps``; the last entry must be 1
    tol : outside fraction below which a disk is membership evidence
    grid_n : boundary samples for certificate checks
    opt_grid_n : boundary samples inside the optimiser
    maxfev : function evaluations per simplex run (per unknown)
    ambient_radius : radius of the ambient ball; ``None`` takes twice the
        largest of the sample norms and ``||z||`` (at least 1)
    separation_degrees : degrees tried by the separating search
    margin_min : Separation requires ``margin > 1 + margin_min``
    sep_iters, sep_restarts : subgradient budget
    seed : RNG seed
    """

    degrees: tuple = (1, 2, 4, 8)
    restarts: int = 16
    patience: int = 3
    eps_factors: tuple = (5.0, 2.5, 1.0)
    tol: float = 1e-2
    grid_n: int = 1024
    opt_grid_n: int = 256
    maxfev: int = 150
    ambient_radius: float | None = None
    separation_degrees: tuple = (1, 2, 4)
    margin_min: float = 0.05
    sep_iters: int = 400
    sep_restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if not self.degrees or min(self.degrees) < 1:
            raise ParameterError("degree schedule must contain positive degrees")
        if abs(self.eps_factors[-1] - 1.0) > 1e-12:
            raise ParameterError("the eps continuation must end at factor 1")


@dataclass
class HullCertificate:
    """Outcome of a hull query.

    ``kind`` is ``"membership"``, ``"separation"`` or ``"unknown"``.
    """

    kind: str
    z: np.ndarray
    eps: float
    disk: AnalyticMap | None = None
    outside_fraction: float | None = None
    poly: MultiPoly | None = None
    margin: float | None = None
    best_outside_fraction: float | None = None
    best_margin: float | None = None
    notes: list = field(default_factory=list)

    def verify(self, K: CompactSet, grid_n: int = 2048, tol: float = 1e-2) -> bool:
        """Independent re-check by direct evaluation."""
        if self.kind == "separation":
            return bool(abs(complex(self.poly(self.z[None, :])[0])) / (K.sup_abs(self.poly) + DELTA_NORM)
                        >= self.margin * (1 - 1e-12))
        if self.kind == "membership":
            ok_center = np.linalg.norm(self.disk.center() - self.z) < 1e-9
            return bool(ok_center and outside_fraction(self.disk, K, grid_n, self.eps) < 2 * tol)
        return True

    def to_dict(self) -> dict:
        def c(z):
            return [[float(v.real), float(v.imag)] for v in np.atleast_1d(z)]

        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "z": c(self.z),
            "eps": self.eps,
            "disk": None if self.disk is None else self.disk.to_dict(),
            "outside_fraction": self.outside_fraction,
            "poly": None if self.poly is None else self.poly.to_dict(),
            "margin": self.margin,
            "best_outside_fraction": self.best_outside_fraction,
            "best_margin": self.best_margin,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "HullCertificate":
        z = np.array([complex(a, b) for a, b in d["z"]])
        return cls(
            d["kind"], z, d["eps"],
            disk=None if d["disk"] is None else from_dict(d["disk"]),
            outside_fraction=d["outside_fraction"],
            poly=None if d["poly"] is None else MultiPoly.from_dict(d["poly"]),
            margin=d["margin"],
            best_outside_fraction=d["best_outside_fraction"],
            best_margin=d["best_margin"],
            notes=list(d.get("notes", [])),
        )


# ---------------------------------------------------------------- separation


def _separation_one(K: CompactSet, z: np.ndarray, degree: int, cfg: HullConfig, rng):
    """Minimise max_K |1 + sum c_a ((w - z)/rho)^a| over c (p(z) = 1 fixed)."""
    n = K.dim
    exps = monomial_exponents(n, degree)[1:]
    shift = K.samples - z
    rho = float(np.max(np.linalg.norm(shift, axis=1))) or 1.0
    u = shift / rho
    A = np.prod(u[:, None, :] ** exps[None, :, :], axis=-1)  # (m, k)
    ones = np.ones(len(u))

    def sup(c):
        return float(np.max(np.abs(ones + A @ c)))

    c0, *_ = np.linalg.lstsq(A, -ones, rcond=None)
    best_c, best = c0, sup(c0)
    k = A.shape[1]
    for restart in range(cfg.sep_restarts):
        if restart == 0:
            c = c0.copy()
        else:
            c = best_c + 0.1 * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
        val = sup(c)
        step0 = 0.5 * max(val, 1e-3)
        for it in range(cfg.sep_iters):
            v = ones + A @ c
            j = int(np.argmax(np.abs(v)))
            val = abs(v[j])
            if val < best:
                best, best_c = val, c.copy()
            if val == 0:
                break
            # subgradient of |v_j| with respect to conj(c)
            g = np.conj(A[j]) * (v[j] / val)
            gn = np.linalg.norm(g)
            if gn == 0:
                break
            c = c - step0 / np.sqrt(it + 1) * g / gn
    val = sup(best_c)
    q = MultiPoly(exps, best_c / rho ** exps.sum(axis=1))
    q = MultiPoly(np.vstack([np.zeros((1, n), dtype=int), q.exponents]),
                  np.concatenate([[1.0], q.coeffs]))
    p = q.shifted(z)
    margin = abs(complex(p(z[None, :])[0])) / (K.sup_abs(p) + DELTA_NORM)
    return p, float(margin), val


def separation_search(K: CompactSet, z, degree: int, cfg: HullConfig | None = None) -> HullCertificate:
    """Look for a polynomial of total degree <= ``degree`` with
    ``|p(z)| > (1 + margin_min) max_K |p|``.

    The polynomial is written ``p(w) = 1 + sum_a c_a (w - z)^a`` so that
    ``p(z) = 1``, and ``max_K |p|`` (a convex function of ``c``) is driven
    down by a least-squares warm start followed by subgradient steps with
    random restarts.
    """
    cfg = cfg or HullConfig()
    if degree < 1:
        raise ParameterError("separation degree must be >= 1")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 7919, degree]))
    p, margin, _ = _separation_one(K, z, degree, cfg, rng)
    if margin > 1 + cfg.margin_min:
        return HullCertificate("separation", z, K.eps, poly=p, margin=margin, best_margin=margin)
    return HullCertificate("unknown", z, K.eps, best_margin=margin,
                           notes=[f"no separating polynomial of degree <= {degree} found"])


# ---------------------------------------------------------------- membership


def _ramp(d, eps):
    """Clamped linear ramp of width eps/2 centred at eps."""
    return np.clip((d - 0.75 * eps) / (0.5 * eps), 0.0, 1.0)


class _DiskObjective:
    def __init__(self, K, z, degree, n_grid, ambient_radius, inside_target=False):
        self.K = K
        self.z = z
        self.n = K.dim
        self.degree = degree
        zeta = BoundaryGrid(n_grid).points
        self.V = zeta[:, None] ** np.arange(1, degree + 1)[None, :]
        self.R = ambient_radius
        self.scale = K.diam if K.diam > 0 else 1.0

    def coeffs(self, x):
        half = len(x) // 2
        return (x[:half] + 1j * x[half:]).reshape(self.n, self.degree)

    def boundary(self, x):
        return self.z + self.V @ self.coeffs(x).T

    def __call__(self, x, eps):
        b = self.boundary(x)
        d = self.K.distance(b)
        val = np.mean(_ramp(d, eps))
        val += 1e-2 * np.mean(np.minimum(d, self.scale)) / self.scale
        excess = np.maximum(np.linalg.norm(b, axis=1) - self.R, 0.0)
        val += 10.0 * np.mean(excess**2) / self.R**2
        return float(val)

    def disk(self, x) -> Polynomial:
        c = np.concatenate([self.z[:, None], self.coeffs(x)], axis=1)
        return Polynomial(c)


def _pad(x, n, d_old, d_new):
    if x is None:
        return np.zeros(2 * n * d_new)
    half = len(x) // 2
    c = (x[:half] + 1j * x[half:]).reshape(n, d_old)
    out = np.zeros((n, d_new), dtype=complex)
    out[:, :d_old] = c
    return np.concatenate([out.real.ravel(), out.imag.ravel()])


def _nelder_mead(fun, x0, step, maxfev):
    dim = len(x0)
    simplex = np.vstack([x0] + [x0 + step * np.eye(dim)[i] for i in range(dim)])
    res = minimize(fun, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": maxfev, "xatol": 1e-7,
                            "fatol": 1e-10, "adaptive": True})
    return res.x, float(res.fun)


def _ambient(K: CompactSet, z: np.ndarray, cfg: HullConfig) -> float:
    R = cfg.ambient_radius
    if R is None:
        R = max(1.0, 2.0 * float(np.max(np.linalg.norm(K.samples, axis=1))), 2.0 * float(np.linalg.norm(z)))
    if np.linalg.norm(z) >= R:
        raise ParameterError("z lies outside the ambient ball")
    return R


def _center_excluded(K: CompactSet, z: np.ndarray, R: float, tol: float):
    """Return a real direction ruling out any admissible disk centred at ``z``, or None.

    A disk's centre is the mean of its boundary values.  If all but a
    fraction ``tol`` of them lie within ``K.eps`` of ``K`` and all of them lie
    in the ball of radius ``R``, then for every unit vector ``u`` the centre
    satisfies ``<u, z> <= max(h, (1 - tol) h + tol R)`` with
    ``h = max_K <u, k> + eps``.
    """
    pts, zr = _realify(K.samples), _realify(z)
    dirs = [zr - pts.mean(axis=0)]
    dirs += list(np.eye(len(zr))) + list(-np.eye(len(zr)))
    for u in dirs:
        norm = np.linalg.norm(u)
        if norm == 0:
            continue
        u = u / norm
        h = float(np.max(pts @ u)) + K.eps
        if float(zr @ u) > max(h, (1 - tol) * h + tol * R) + 1e-12:
            return u
    return None


def _disk_search(K: CompactSet, z: np.ndarray, cfg: HullConfig, target_fraction=None):
    """Degree-escalating simplex search; returns (best disk, its outside fraction, trace)."""
    R = _ambient(K, z, cfg)
    n = K.dim
    tol = cfg.tol if target_fraction is None else target_fraction
    best_x, best_d, best_frac, best_disk = None, 0, 1.0, Polynomial.constant(z)
    best_frac = outside_fraction(best_disk, K, cfg.grid_n)
    trace = [(0, best_frac)]
    if best_frac < tol:
        return best_disk, best_frac, trace
    for degree in cfg.degrees:
        obj = _DiskObjective(K, z, degree, cfg.opt_grid_n, R)
        warm = _pad(best_x, n, best_d, degree) if best_x is not None else None
        level_best, stale = np.inf, 0
        for restart in range(cfg.restarts):
            if stale >= cfg.patience:
                break
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, degree, restart]))
            if warm is not None and restart == 0:
                x = warm.copy()
            else:
                scale = (R - np.linalg.norm(z)) / np.sqrt(degree)
                x = scale * rng.standard_normal(2 * n * degree) / np.sqrt(2 * n)
                if warm is not None:
                    x = warm + 0.3 * x
            for factor in cfg.eps_factors:
                eps = K.eps * factor
                x, _ = _nelder_mead(lambda y: obj(y, eps), x, 0.1 * obj.scale / degree,
                                    cfg.maxfev * len(x))
            disk = obj.disk(x)
            if np.max(np.linalg.norm(disk.boundary(cfg.grid_n), axis=1)) > R:
                continue
            frac = outside_fraction(disk, K, cfg.grid_n)
            trace.append((degree, frac))
            stale = stale + 1 if frac >= level_best - 1e-5 else 0
            level_best = min(level_best, frac)
            if frac < best_frac or (frac == best_frac and best_x is not None and degree == best_d):
                best_x, best_d, best_frac, best_disk = x, degree, frac, disk
            if best_frac < tol:
                return best_disk, best_frac, trace
        if best_x is None:
            best_x, best_d = np.zeros(2 * n * degree), degree
    return best_disk, best_frac, trace


def membership_search(K: CompactSet, z, cfg: HullConfig | None = None) -> HullCertificate:
    """Search for a centred polynomial disk ``f(0) = z`` whose boundary stays
    within ``K.eps`` of ``K`` except on a fraction below ``cfg.tol``.

    The constant term is fixed to ``z``; the remaining coefficients are
    optimised by Nelder-Mead on a smoothed outside fraction, with eps
    continuation, degree escalation and random restarts.  An exhausted budget
    yields Unknown, never a false Membership.
    """
    cfg = cfg or HullConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if _center_excluded(K, z, _ambient(K, z, cfg), cfg.tol) is not None:
        return HullCertificate("unknown", z, K.eps, disk=Polynomial.constant(z),
                               best_outside_fraction=float(outside_fraction(Polynomial.constant(z), K,
                                                                            cfg.grid_n)),
                               notes=["z is outside the convex hull of the neighbourhood; no centred disk exists"])
    disk, frac, _ = _disk_search(K, z, cfg)
    if frac < cfg.tol:
        return HullCertificate("membership", z, K.eps, disk=disk, outside_fraction=frac,
                               best_outside_fraction=frac,
                               notes=[f"certified at eps = {K.eps:.6g} only"])
    return HullCertificate("unknown", z, K.eps, disk=disk, best_outside_fraction=frac,
                           notes=["disk search budget exhausted"])


def hull_classify(K: CompactSet, z, cfg: HullConfig | None = None) -> HullCertificate:
    """Separation first (cheap), then membership; Unknown carries both best efforts."""
    cfg = cfg or HullConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    best_margin = 0.0
    for degree in cfg.separation_degrees:
        cert = separation_search(K, z, degree, cfg)
        if cert.kind == "separation":
            return cert
        best_margin = max(best_margin, cert.best_margin)
    cert = membership_search(K, z, cfg)
    if cert.kind == "membership":
        cert.best_margin = best_margin
        return cert
    cert.best_margin = best_margin
    cert.notes.append("neither certificate found")
    return cert


@dataclass
class PluriharmonicEstimate:
    value: float
    witness: AnalyticMap
    inside_fraction: float


def pluriharmonic_measure_estimate(z, E: CompactSet, ambient_radius: float,
                                   cfg: HullConfig | None = None) -> PluriharmonicEstimate:
    """Upper bound ``-(best boundary fraction in E)`` of the pluriharmonic measure.

    ``E`` is the open set ``{dist(., samples) < E.eps}``; disks are kept
    inside the ball of radius ``ambient_radius``.
    """
    cfg = cfg or HullConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.linalg.norm(z) < ambient_radius:
        raise ParameterError("z must lie in the ambient ball")
    local = HullConfig(**{**cfg.__dict__, "ambient_radius": ambient_radius})
    disk, frac, _ = _disk_search(E, z, local)
    return PluriharmonicEstimate(-(1.0 - frac), disk, 1.0 - frac)
