"""Analytic disks: holomorphic maps of the closed unit disk into C^n.

Maps are immutable expression trees over a small closed set of nodes:

* :class:`Polynomial` -- one polynomial in zeta per coordinate;
* :class:`MoebiusPrecompose` -- ``f o G_a`` with ``G_a(z) = (z + a) / (1 + conj(a) z)``;
* :class:`BlaschkePrecompose` -- ``f o B`` for a finite Blaschke product ``B``;
* :class:`AnnulusSum` -- ``w -> f(w) + g(r / w) + offset`` on the ring ``r <= |w| <= 1``;
* :class:`StripExpPrecompose` -- ``h o e`` where ``e`` maps the disk onto that ring.

Every node evaluates vectorised: ``f(zeta)`` accepts any array of complex
parameters and returns an array with a trailing axis of length ``f.dim``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DimensionError, DomainError, ParameterError

DOMAIN_TOL = 1e-12
FD_STEP = 1e-6


def moebius(a, zeta):
    """The disk automorphism G_a(zeta) = (zeta + a) / (1 + conj(a) zeta).

    ``G_a(0) = a`` and ``G_{-a}`` is the inverse of ``G_a``.
    """
    a = complex(a)
    if not abs(a) < 1:
        raise ParameterError(f"moebius parameter must satisfy |a| < 1, got {a}")
    zeta = np.asarray(zeta, dtype=complex)
    return (zeta + a) / (1 + np.conj(a) * zeta)


def blaschke(zeros, zeta):
    """Finite Blaschke product prod_i (zeta - a_i) / (1 - conj(a_i) zeta)."""
    zeros = np.atleast_1d(np.asarray(zeros, dtype=complex))
    if np.any(np.abs(zeros) >= 1):
        raise ParameterError("Blaschke zeros must lie in the open unit disk")
    zeta = np.asarray(zeta, dtype=complex)
    out = np.ones(zeta.shape, dtype=complex)
    for a in zeros:
        out = out * (zeta - a) / (1 - np.conj(a) * zeta)
    return out


def strip_exp(zeta, r, alpha):
    """Conformal map of the unit disk onto the ring {r < |w| < 1}.

    With ``q = exp(i pi (1 - alpha))`` and ``M(z) = (z + q) / (1 + q z)``, which
    sends the disk onto the upper half plane, the map is

        e(z) = exp(-i ln(r) / pi * Log M(z)),

    i.e. ``exp`` composed with a map onto the strip ``ln r < Re xi < 0``.
    It sends 0 to ``r**(1 - alpha)`` and 1 to 1; the boundary arc
    ``|arg z| < pi alpha`` goes to the unit circle and the complementary arc to
    the circle of radius ``r``.  At the two arc endpoints ``e`` spirals; the
    argument of ``M`` is clamped to ``[0, pi]`` so rounding on the real axis
    can never flip a point to radius ``1/r``.
    """
    if not (r > 1e-12 and r < 1):
        raise ParameterError(f"ring radius must lie in (1e-12, 1), got {r}")
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    zeta = np.asarray(zeta, dtype=complex)
    q = np.exp(1j * np.pi * (1 - alpha))
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (zeta + q) / (1 + q * zeta)
    mod = np.abs(m)
    mod = np.where(np.isfinite(mod), mod, 1e300)
    mod = np.clip(mod, 1e-300, 1e300)
    ang = np.angle(m)
    ang = np.where(ang < -np.pi / 2, np.pi, np.maximum(ang, 0.0))
    log_m = np.log(mod) + 1j * ang
    return np.exp(-1j * np.log(r) / np.pi * log_m)


@dataclass(frozen=True)
class BoundaryGrid:
    """Uniform grid theta_k = 2 pi k / N on the unit circle (weights 1/N)."""

    n: int = 4096

    def __post_init__(self):
        if int(self.n) < 8:
            raise ParameterError("boundary grid needs N >= 8")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n) / self.n

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)


def _check_unit(zeta):
    if zeta.size and np.max(np.abs(zeta)) > 1 + DOMAIN_TOL:
        raise DomainError(f"|zeta| = {np.max(np.abs(zeta)):.17g} exceeds 1")


class AnalyticMap:
    """Base class of all disk nodes."""

    dim: int

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        self._check_domain(zeta)
        return self._eval(zeta)

    def _check_domain(self, zeta):
        _check_unit(zeta)

    def _eval(self, zeta):  # pragma: no cover - abstract
        raise NotImplementedError

    def eval(self, zeta) -> np.ndarray:
        return self(zeta)

    def center(self) -> np.ndarray:
        return self(0.0)

    def boundary(self, grid: BoundaryGrid | int = 4096) -> np.ndarray:
        if not isinstance(grid, BoundaryGrid):
            grid = BoundaryGrid(int(grid))
        return self(grid.points)

    def derivative(self, zeta) -> np.ndarray:
        """Complex derivative by central differences along the circle tangent.

        The step is ``1e-6 * max(1, |zeta|)``; moving tangentially keeps the
        stencil inside the domain tolerance on the boundary.
        """
        zeta = np.asarray(zeta, dtype=complex)
        mod = np.abs(zeta)
        direction = np.where(mod > 0, 1j * zeta / np.where(mod > 0, mod, 1), 1.0)
        h = FD_STEP * np.maximum(1.0, mod) * direction
        fp = self(zeta + h)
        fm = self(zeta - h)
        return (fp - fm) / (2 * h)[..., None]

    def compose_moebius(self, a) -> "MoebiusPrecompose":
        return MoebiusPrecompose(self, a)

    def compose_blaschke(self, zeros) -> "BlaschkePrecompose":
        return BlaschkePrecompose(self, zeros)

    def to_dict(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _unpair(p):
    return complex(p[0], p[1])


class Polynomial(AnalyticMap):
    """zeta -> (sum_k c_{1k} zeta^k, ..., sum_k c_{nk} zeta^k).

    ``coeffs`` has shape (n, d + 1) with ascending powers; a 1-D array is a
    scalar map.
    """

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[1] == 0:
            raise ParameterError("polynomial coefficients must have shape (n, d+1)")
        if not np.all(np.isfinite(c)):
            raise ParameterError("non-finite polynomial coefficient")
        c = c.copy()
        c.setflags(write=False)
        self.coeffs = c
        self.dim = c.shape[0]

    @classmethod
    def constant(cls, point) -> "Polynomial":
        return cls(np.atleast_1d(np.asarray(point, dtype=complex))[:, None])

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls([0.0, 1.0])

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.any(self.coeffs != 0, axis=0))[0]
        return int(nz[-1]) if len(nz) else 0

    def _eval(self, zeta):
        out = np.zeros(zeta.shape + (self.dim,), dtype=complex)
        for k in range(self.coeffs.shape[1] - 1, -1, -1):
            out = out * zeta[..., None] + self.coeffs[:, k]
        return out

    def derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        d = self.coeffs.shape[1]
        if d == 1:
            return np.zeros(zeta.shape + (self.dim,), dtype=complex)
        dc = self.coeffs[:, 1:] * np.arange(1, d)
        return Polynomial(dc)._eval(zeta)

    def to_dict(self):
        return {"type": "poly", "coeffs": [[_pair(c) for c in row] for row in self.coeffs]}

    def __repr__(self):
        return f"Polynomial(dim={self.dim}, degree={self.degree})"


class MoebiusPrecompose(AnalyticMap):
    """f o G_a."""

    def __init__(self, inner: AnalyticMap, a):
        a = complex(a)
        if not abs(a) < 1:
            raise ParameterError(f"moebius parameter must satisfy |a| < 1, got {a}")
        self.inner = inner
        self.a = a
        self.dim = inner.dim

    def _eval(self, zeta):
        w = (zeta + self.a) / (1 + np.conj(self.a) * zeta)
        # |G_a| <= 1 up to rounding on the closed disk
        m = np.abs(w)
        w = np.where(m > 1, w / np.maximum(m, 1), w)
        return self.inner._eval(w)

    def to_dict(self):
        return {"type": "moebius", "a": _pair(self.a), "inner": self.inner.to_dict()}

    def __repr__(self):
        return f"MoebiusPrecompose({self.inner!r}, a={self.a})"


class BlaschkePrecompose(AnalyticMap):
    """f o B with B(zeta) = prod (zeta - a_i) / (1 - conj(a_i) zeta)."""

    def __init__(self, inner: AnalyticMap, zeros):
        z = np.atleast_1d(np.asarray(zeros, dtype=complex)).copy()
        if np.any(np.abs(z) >= 1):
            raise ParameterError("Blaschke zeros must lie in the open unit disk")
        z.setflags(write=False)
        self.inner = inner
        self.zeros = z
        self.dim = inner.dim

    def _eval(self, zeta):
        w = blaschke(self.zeros, zeta)
        m = np.abs(w)
        w = np.where(m > 1, w / np.maximum(m, 1), w)
        return self.inner._eval(w)

    def to_dict(self):
        return {
            "type": "blaschke",
            "zeros": [_pair(a) for a in self.zeros],
            "inner": self.inner.to_dict(),
        }

    def __repr__(self):
        return f"BlaschkePrecompose({self.inner!r}, zeros={list(self.zeros)})"


class AnnulusSum(AnalyticMap):
    """w -> f(w) + g(r / w) + offset, holomorphic on the ring r <= |w| <= 1.

    Only meaningful composed with :class:`StripExpPrecompose`; evaluating it
    directly checks the ring instead of the unit disk.
    """

    def __init__(self, outer: AnalyticMap, inner: AnalyticMap, r: float, offset=None):
        if outer.dim != inner.dim:
            raise DimensionError("annulus sum of maps with different dimensions")
        if not 0 < r < 1:
            raise ParameterError("ring radius must lie in (0, 1)")
        self.outer = outer
        self.inner = inner
        self.r = float(r)
        self.dim = outer.dim
        off = np.zeros(self.dim, dtype=complex) if offset is None else np.asarray(offset, dtype=complex)
        off = off.reshape(self.dim).copy()
        off.setflags(write=False)
        self.offset = off

    def _check_domain(self, zeta):
        mod = np.abs(zeta)
        if zeta.size and (mod.max() > 1 + DOMAIN_TOL or mod.min() < self.r * (1 - DOMAIN_TOL)):
            raise DomainError(f"AnnulusSum needs {self.r} <= |w| <= 1")

    def _eval(self, w):
        mod = np.abs(w)
        w = np.where(mod > 1, w / np.where(mod > 0, mod, 1), w)
        u = self.r / w
        umod = np.abs(u)
        u = np.where(umod > 1, u / umod, u)
        return self.outer._eval(w) + self.inner._eval(u) + self.offset

    def to_dict(self):
        return {
            "type": "annulus_sum",
            "r": self.r,
            "offset": [_pair(c) for c in self.offset],
            "outer": self.outer.to_dict(),
            "inner": self.inner.to_dict(),
        }

    def __repr__(self):
        return f"AnnulusSum(r={self.r})"


class StripExpPrecompose(AnalyticMap):
    """h o e with e = :func:`strip_exp` (r, alpha); ``inner=None`` gives e itself."""

    def __init__(self, inner: AnalyticMap | None, r: float, alpha: float):
        if not (r > 1e-12 and r < 1):
            raise ParameterError(f"ring radius must lie in (1e-12, 1), got {r}")
        if not 0 < alpha < 1:
            raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
        if inner is not None and isinstance(inner, AnnulusSum) and abs(inner.r - r) > 1e-15 * max(1, r):
            raise ParameterError("strip map radius differs from the annulus radius")
        self.inner = inner
        self.r = float(r)
        self.alpha = float(alpha)
        self.dim = 1 if inner is None else inner.dim

    def _eval(self, zeta):
        w = strip_exp(zeta, self.r, self.alpha)
        if self.inner is None:
            return w[..., None]
        # keep the ring exactly: rounding may put |w| a hair outside [r, 1]
        mod = np.abs(w)
        w = np.where(mod < self.r, w * (self.r / mod), w)
        w = np.where(mod > 1, w / mod, w)
        return self.inner._eval(w)

    def to_dict(self):
        return {
            "type": "strip_exp",
            "r": self.r,
            "alpha": self.alpha,
            "inner": None if self.inner is None else self.inner.to_dict(),
        }

    def __repr__(self):
        return f"StripExpPrecompose({self.inner!r}, r={self.r}, alpha={self.alpha})"


def from_dict(d: dict) -> AnalyticMap:
    """Rebuild a map from its JSON expression tree."""
    kind = d.get("type")
    if kind == "poly":
        rows = [[_unpair(p) for p in row] for row in d["coeffs"]]
        # rows of different lengths are padded with zero coefficients
        width = max((len(r) for r in rows), default=0)
        return Polynomial([r + [0j] * (width - len(r)) for r in rows])
    if kind == "moebius":
        return MoebiusPrecompose(from_dict(d["inner"]), _unpair(d["a"]))
    if kind == "blaschke":
        return BlaschkePrecompose(from_dict(d["inner"]), [_unpair(p) for p in d["zeros"]])
    if kind == "annulus_sum":
        return AnnulusSum(
            from_dict(d["outer"]),
            from_dict(d["inner"]),
            d["r"],
            [_unpair(p) for p in d["offset"]],
        )
    if kind == "strip_exp":
        inner = None if d.get("inner") is None else from_dict(d["inner"])
        return StripExpPrecompose(inner, d["r"], d["alpha"])
    raise ParameterError(f"unknown map node type {kind!r}")


def from_json(text: str) -> AnalyticMap:
    return from_dict(json.loads(text))


def map_schema() -> dict:
    """The JSON schema of serialised maps (shipped as package data)."""
    text = resources.files("anadisk").joinpath("schema/analytic_map.schema.json").read_text()
    return json.loads(text)


def sup_norm(f: AnalyticMap, grid: BoundaryGrid | int = 4096, refine: bool = True,
             tol: float = 1e-8, max_n: int = 1 << 20) -> float:
    """Max of ||f|| over boundary samples.

    Maps in the composition set are holomorphic on the closed disk, so the
    sup over the disk is attained on the circle.  With ``refine`` the grid is
    doubled until two successive estimates differ by less than ``tol``.
    """
    n = grid.n if isinstance(grid, BoundaryGrid) else int(grid)
    if n < 256:
        raise ParameterError("sup_norm needs a boundary grid with N >= 256")
    est = float(np.max(np.linalg.norm(f.boundary(n), axis=-1)))
    if not refine:
        return est
    while n < max_n:
        n *= 2
        # the finer grid contains the coarser one, so the estimate is monotone
        nxt = float(np.max(np.linalg.norm(f.boundary(n), axis=-1)))
        if abs(nxt - est) < tol:
            return nxt
        est = nxt
    return est


def lipschitz_bound(f: AnalyticMap, n: int = 2048, safety: float = 1.1) -> float:
    """Upper estimate of sup ||f'|| over the closed disk.

    ``||f'||`` is subharmonic, so its sup sits on the circle; for polynomials
    the coefficient bound sum k |c_k| is used directly.
    """
    if isinstance(f, Polynomial):
        d = f.coeffs.shape[1]
        per = np.abs(f.coeffs[:, 1:]) @ np.arange(1, d) if d > 1 else np.zeros(f.dim)
        return float(np.linalg.norm(per))
    grid = BoundaryGrid(n).points
    return safety * float(np.max(np.linalg.norm(f.derivative(grid), axis=-1)))


def _bloch_grid(radii, angles):
    if radii is None:
        radii = np.linspace(0.0, 1 - 1e-3, 512)
    if angles is None:
        angles = 256
    if np.ndim(angles) == 0:
        angles = 2 * np.pi * np.arange(int(angles)) / int(angles)
    radii = np.asarray(radii, dtype=float)
    if radii.max() >= 1:
        raise DomainError("Bloch grid radii must stay inside the disk")
    return radii[:, None] * np.exp(1j * np.asarray(angles))[None, :]


def bloch_norm_of_derivative(deriv, radii=None, angles=None, return_witness=False):
    """Grid max of |u'(zeta)| (1 - |zeta|^2) given a callable for u'."""
    z = _bloch_grid(radii, angles)
    vals = np.abs(deriv(z)) * (1 - np.abs(z) ** 2)
    k = int(np.argmax(vals))
    best = float(vals.flat[k])
    if return_witness:
        return best, complex(z.flat[k])
    return best


def bloch_norm(u: AnalyticMap, radii=None, angles=None, return_witness=False):
    """Lower estimate of the Bloch seminorm sup |u'(zeta)| (1 - |zeta|^2).

    Evaluated on a polar grid with radii up to ``1 - 1e-3`` by default; the
    estimate increases towards the true value as the grid refines.
    """
    if u.dim != 1:
        raise DimensionError("bloch_norm needs a scalar-valued map")
    return bloch_norm_of_derivative(lambda z: u.derivative(z)[..., 0], radii, angles, return_witness)
