"""Holomorphic measures as weighted boundary point clouds.

The holomorphic measure of a disk ``f`` is the push-forward of normalised
arc length on the circle by the boundary values of ``f``.  Here it is an
equal-weight cloud of ``f(exp(2 pi i k / N))``.  Weak convergence is tested
through mixed moments ``int z^alpha conj(z)^beta d mu`` up to a total degree.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .disk import AnalyticMap, BoundaryGrid
from .errors import DimensionError, ParameterError, SizeError
from .polynomial import MultiPoly, monomial_exponents

log = logging.getLogger(__name__)

MOMENT_CAP = 20000
ROUND_TOL = 1e-12


class EmpiricalMeasure:
    """Probability measure sum_k w_k delta_{z_k} on C^n."""

    def __init__(self, points, weights=None):
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        if weights is None:
            w = np.full(len(pts), 1.0 / len(pts))
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(pts),):
                raise ParameterError("one weight per point is required")
            if np.any(w < 0):
                raise ParameterError("weights must be nonnegative")
            total = w.sum()
            if abs(total - 1) > 1e-9:
                raise ParameterError(f"weights sum to {total}, expected 1")
            w = w / total
        if not np.all(np.isfinite(pts)):
            raise ParameterError("measure points must be finite")
        pts.setflags(write=False)
        w.setflags(write=False)
        self.points = pts
        self.weights = w
        self.radius = float(np.max(np.linalg.norm(pts, axis=1))) if len(pts) else 0.0

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> complex:
        return np.asarray(values) @ self.weights

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = []
        for i in range(self.dim):
            header += [f"re_z{i + 1}", f"im_z{i + 1}"]
        w.writerow(header + ["weight"])
        for p, wt in zip(self.points, self.weights):
            row = []
            for c in p:
                row += [repr(float(c.real)), repr(float(c.imag))]
            w.writerow(row + [repr(float(wt))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EmpiricalMeasure":
        rows = list(csv.reader(io.StringIO(text)))
        data = np.array([[float(x) for x in r] for r in rows[1:]])
        n = (data.shape[1] - 1) // 2
        pts = data[:, 0:2 * n:2] + 1j * data[:, 1:2 * n:2]
        return cls(pts, data[:, -1])


def pushforward(f: AnalyticMap, grid: BoundaryGrid | int = 4096) -> EmpiricalMeasure:
    """Equal-weight measure at the boundary values f(exp(i theta_k))."""
    if not isinstance(grid, BoundaryGrid):
        grid = BoundaryGrid(int(grid))
    return EmpiricalMeasure(f(grid.points))


def mixture(mu1: EmpiricalMeasure, mu2: EmpiricalMeasure, alpha: float) -> EmpiricalMeasure:
    """alpha mu1 + (1 - alpha) mu2."""
    if mu1.dim != mu2.dim:
        raise DimensionError("mixture of measures in different dimensions")
    if not 0 <= alpha <= 1:
        raise ParameterError("mixture weight must lie in [0, 1]")
    pts = np.concatenate([mu1.points, mu2.points])
    w = np.concatenate([alpha * mu1.weights, (1 - alpha) * mu2.weights])
    return EmpiricalMeasure(pts, w / w.sum())


def atom(point) -> EmpiricalMeasure:
    return EmpiricalMeasure(np.atleast_1d(np.asarray(point, dtype=complex))[None, :])


def center(mu: EmpiricalMeasure) -> np.ndarray:
    """Barycenter int z d mu; equals f(0) for the push-forward of a disk f."""
    return mu.weights @ mu.points


def moment_indices(n: int, dmax: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs (alpha, beta) of multi-indices with |alpha| + |beta| <= dmax."""
    exps = monomial_exponents(2 * n, dmax)
    return [(tuple(int(x) for x in e[:n]), tuple(int(x) for x in e[n:])) for e in exps]


@dataclass(frozen=True)
class MomentVector:
    """Mixed moments of a measure, keyed by (alpha, beta)."""

    n: int
    dmax: int
    index: tuple
    values: np.ndarray = field(repr=False)

    def __getitem__(self, key):
        alpha, beta = key
        return self.values[self._lookup[(tuple(alpha), tuple(beta))]]

    @property
    def _lookup(self):
        return {k: i for i, k in enumerate(self.index)}

    def as_dict(self) -> dict:
        return {k: complex(v) for k, v in zip(self.index, self.values)}

    def to_json(self) -> str:
        out = {}
        for (a, b), v in zip(self.index, self.values):
            key = ".".join(map(str, a)) + "|" + ".".join(map(str, b))
            out[key] = [float(v.real), float(v.imag)]
        return json.dumps({"n": self.n, "dmax": self.dmax, "moments": out}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MomentVector":
        d = json.loads(text)
        vals = {}
        for key, (re, im) in d["moments"].items():
            a, b = key.split("|")
            vals[(tuple(int(x) for x in a.split(".")), tuple(int(x) for x in b.split(".")))] = complex(re, im)
        index = tuple(moment_indices(d["n"], d["dmax"]))
        if set(index) != set(vals):
            raise ParameterError("moment keys do not match (n, dmax)")
        return cls(d["n"], d["dmax"], index, np.array([vals[k] for k in index]))


def moments(mu: EmpiricalMeasure, dmax: int = 4, cap: int = MOMENT_CAP) -> MomentVector:
    """All mixed moments int z^alpha conj(z)^beta d mu with total degree <= dmax."""
    if dmax < 1:
        raise ParameterError("dmax must be >= 1")
    n = mu.dim
    from math import comb

    count = comb(2 * n + dmax, dmax)
    if count > cap:
        raise SizeError(f"{count} moment indices exceed the cap {cap}")
    idx = moment_indices(n, dmax)
    z = mu.points
    zb = np.conj(z)
    pw = np.ones((dmax + 1,) + z.shape, dtype=complex)
    pwb = np.ones((dmax + 1,) + z.shape, dtype=complex)
    for k in range(1, dmax + 1):
        pw[k] = pw[k - 1] * z
        pwb[k] = pwb[k - 1] * zb
    vals = np.empty(len(idx), dtype=complex)
    for j, (a, b) in enumerate(idx):
        term = np.ones(len(z), dtype=complex)
        for i in range(n):
            if a[i]:
                term = term * pw[a[i], :, i]
            if b[i]:
                term = term * pwb[b[i], :, i]
        vals[j] = mu.weights @ term
    vals.setflags(write=False)
    return MomentVector(n, dmax, tuple(idx), vals)


def weak_distance(mu1, mu2, dmax: int = 4) -> float:
    """max over |alpha| + |beta| <= dmax of |moment difference|.

    Either argument may be an :class:`EmpiricalMeasure` or a precomputed
    :class:`MomentVector`.
    """
    m1 = mu1 if isinstance(mu1, MomentVector) else None
    m2 = mu2 if isinstance(mu2, MomentVector) else None
    n1 = m1.n if m1 is not None else mu1.dim
    n2 = m2.n if m2 is not None else mu2.dim
    if n1 != n2:
        raise DimensionError(f"measures live in C^{n1} and C^{n2}")
    if m1 is None:
        m1 = moments(mu1, dmax)
    if m2 is None:
        m2 = moments(mu2, dmax)
    if m1.dmax != dmax or m2.dmax != dmax:
        m1d, m2d = m1.as_dict(), m2.as_dict()
        keys = [k for k in moment_indices(n1, dmax)]
        return float(max(abs(m1d[k] - m2d[k]) for k in keys))
    return float(np.max(np.abs(m1.values - m2.values)))


class PshTestFunction:
    """v(z) = max_j a_j ln|p_j(z)| + constant, a Bremermann-class probe."""

    def __init__(self, terms, constant: float = 0.0):
        terms = [(float(a), p) for a, p in terms]
        if not terms:
            raise ParameterError("a probe needs at least one term")
        if any(a <= 0 for a, _ in terms):
            raise ParameterError("probe weights a_j must be positive")
        dims = {p.dim for _, p in terms}
        if len(dims) != 1:
            raise DimensionError("probe polynomials live in different dimensions")
        self.terms = tuple(terms)
        self.constant = float(constant)
        self.dim = dims.pop()

    def __call__(self, z) -> np.ndarray:
        with np.errstate(divide="ignore"):
            vals = [a * np.log(np.abs(p(z))) for a, p in self.terms]
        return np.max(np.stack(vals), axis=0) + self.constant

    def to_dict(self):
        return {
            "constant": self.constant,
            "terms": [{"a": a, "poly": p.to_dict()} for a, p in self.terms],
        }

    @classmethod
    def from_dict(cls, d):
        return cls([(t["a"], MultiPoly.from_dict(t["poly"])) for t in d["terms"]], d.get("constant", 0.0))


def random_bremermann(n: int, count: int, rng, max_degree: int = 3, max_terms: int = 3,
                      scale: float = 1.0) -> list[PshTestFunction]:
    """A random dictionary of probes with polynomials of degree <= max_degree."""
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_terms + 1))
        terms = []
        for _ in range(k):
            deg = int(rng.integers(1, max_degree + 1))
            n_mono = len(monomial_exponents(n, deg))
            n_terms = int(rng.integers(1, n_mono + 1))
            terms.append((float(rng.uniform(0.2, 2.0)), MultiPoly.random(n, deg, rng, n_terms, scale)))
        out.append(PshTestFunction(terms))
    return out


@dataclass
class ProbeResult:
    index: int
    lhs: float
    rhs: float
    margin: float
    passed: bool
    skipped: bool = False
    renormalized: bool = False


@dataclass
class JensenReport:
    z0: np.ndarray
    slack: float
    results: list
    warnings: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def violations(self) -> list:
        return [r for r in self.results if not r.passed]

    def to_dict(self):
        return {
            "slack": self.slack,
            "passed": self.passed,
            "warnings": list(self.warnings),
            "results": [r.__dict__ for r in self.results],
        }


def probe_integral(v, mu: EmpiricalMeasure):
    """int v d mu for a probe that may be -inf at samples.

    -inf samples are dropped and the remaining weights renormalised; returns
    (value, renormalized flag), with value -inf when every sample is dropped.
    """
    vals = v(mu.points)
    finite = np.isfinite(vals)
    if finite.all():
        return float(vals @ mu.weights), False
    w = mu.weights[finite]
    if w.sum() == 0:
        return -np.inf, True
    return float(vals[finite] @ w / w.sum()), True


def jensen_check(mu: EmpiricalMeasure, z0, probes, slack: float = 0.0) -> JensenReport:
    """Check v(z0) <= int v d mu + slack for every probe v.

    Pluriharmonic probes give equality, so a rounding allowance of
    ``ROUND_TOL * max(1, |v(z0)|)`` is added to ``slack``.
    """
    if not probes:
        raise ParameterError("jensen_check needs at least one probe")
    if slack < 0:
        raise ParameterError("slack must be nonnegative")
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    if z0.shape != (mu.dim,):
        raise DimensionError("z0 and the measure live in different dimensions")
    results, warns = [], []
    for i, v in enumerate(probes):
        lhs = float(v(z0[None, :])[0])
        rhs, renorm = probe_integral(v, mu)
        if rhs == -np.inf:
            msg = f"probe {i} vanishes at every sample; skipped"
            warns.append(msg)
            log.warning(msg)
            results.append(ProbeResult(i, lhs, rhs, np.inf, True, skipped=True, renormalized=True))
            continue
        margin = rhs + slack - lhs
        ok = margin >= -ROUND_TOL * max(1.0, abs(lhs))
        results.append(ProbeResult(i, lhs, rhs, float(margin), bool(ok), renormalized=renorm))
    return JensenReport(z0, slack, results, warns)
