"""Finite leaves: cluster sampling, essentiality, recentering and midrib diagnostics.

An infinite sequence of disks is modelled by a finite indexed family.  Limit
notions (cluster, essential points) become tail statistics over the last
members, with the thresholds recorded in every report.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .disk import AnalyticMap, BoundaryGrid, MoebiusPrecompose, Polynomial, from_dict, lipschitz_bound, sup_norm
from .errors import DimensionError, EmptyLeafError, ParameterError
from .measures import moment_indices, moments, pushforward, weak_distance
from .potential import PreimageBall, WalkConfig, harmonic_measure_interior, harmonic_measure_nested

SCHEMA_VERSION = 1
LOW = 0.01
HIGH = 0.05


class FiniteLeaf:
    """Indexed family of disks bounded by a common radius ``R``.

    Parameters
    ----------
    members : list of :class:`~anadisk.disk.AnalyticMap`
    radius : common bound; computed from boundary samples when omitted
    limit : optional :class:`~anadisk.measures.MomentVector` of the limit measure
    """

    def __init__(self, members, radius: float | None = None, limit=None):
        members = list(members)
        if not members:
            raise EmptyLeafError("a leaf needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise DimensionError("leaf members live in different dimensions")
        sups = [sup_norm(m, 1024, refine=False) for m in members]
        if radius is None:
            radius = max(sups)
        elif max(sups) > radius * (1 + 1e-9) + 1e-12:
            raise ParameterError(f"member sup norm {max(sups):.6g} exceeds the leaf radius {radius:.6g}")
        self.members = members
        self.radius = float(radius)
        self.limit = limit
        self.diagnostics: dict = {}

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __len__(self):
        return len(self.members)

    def centers(self) -> np.ndarray:
        return np.array([m.center() for m in self.members])

    def center(self) -> np.ndarray:
        """Mean of the member centers (the limit center for a converging leaf)."""
        return self.centers().mean(axis=0)

    def center_drift(self) -> float:
        c = self.centers()
        return float(np.max(np.linalg.norm(c - c[-1], axis=1)))

    def measures(self, grid: BoundaryGrid | int = 4096):
        return [pushforward(m, grid) for m in self.members]

    def tail(self, fraction: float = 1 / 3) -> list[int]:
        k = max(1, int(np.ceil(len(self) * fraction)))
        return list(range(len(self) - k, len(self)))

    def to_json(self) -> str:
        return json.dumps([m.to_dict() for m in self.members], sort_keys=True)

    @classmethod
    def from_json(cls, text: str, radius=None) -> "FiniteLeaf":
        return cls([from_dict(d) for d in json.loads(text)], radius)


def torus_leaf(J: int = 20) -> FiniteLeaf:
    """Members ``zeta -> (zeta, zeta**j)``, j = 1..J."""
    members = []
    for j in range(1, J + 1):
        c = np.zeros((2, j + 1), dtype=complex)
        c[0, 1] = 1
        c[1, j] += 1
        members.append(Polynomial(c))
    return FiniteLeaf(members, np.sqrt(2))


def identity_leaf(J: int = 8) -> FiniteLeaf:
    return FiniteLeaf([Polynomial.identity() for _ in range(J)], 1.0)


def moebius_leaf(params) -> FiniteLeaf:
    """Members ``G_a`` for each ``a`` in ``params``."""
    return FiniteLeaf([MoebiusPrecompose(Polynomial.identity(), a) for a in params], 1.0)


def linear_disk_leaf(center, directions) -> FiniteLeaf:
    """Members ``zeta -> center + zeta v`` for each direction vector ``v``."""
    center = np.atleast_1d(np.asarray(center, dtype=complex))
    members = [Polynomial(np.stack([center, np.asarray(v, dtype=complex)], axis=1)) for v in directions]
    return FiniteLeaf(members)


def torus_haar_moments(dmax: int = 4):
    """Moments of normalised Haar measure on the unit torus in C^2: 1 iff a = b."""
    return {(a, b): (1.0 if a == b else 0.0) for a, b in moment_indices(2, dmax)}


# ---------------------------------------------------------------- cluster samples


@dataclass
class ClusterSample:
    points: np.ndarray
    member: np.ndarray
    zeta: np.ndarray

    def verify(self, leaf: FiniteLeaf, atol: float = 1e-12) -> bool:
        for j in np.unique(self.member):
            sel = self.member == j
            if not np.allclose(leaf.members[j](self.zeta[sel]), self.points[sel], rtol=0, atol=atol):
                return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.points.shape[1]
        w.writerow(["member", "re_zeta", "im_zeta"] + [f"{p}_z{i + 1}" for i in range(n) for p in ("re", "im")])
        for j, z, p in zip(self.member, self.zeta, self.points):
            w.writerow([int(j), repr(float(z.real)), repr(float(z.imag))]
                       + [repr(float(v)) for c in p for v in (c.real, c.imag)])
        return buf.getvalue()


def polar_lattice(n_theta: int, radii) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


def cluster_sample(leaf: FiniteLeaf, per_member: int = 256, interior_radii=None,
                   members=None) -> ClusterSample:
    """Values of every member on a deterministic polar lattice.

    ``per_member`` angles times the radii ``interior_radii`` (default 17
    equally spaced radii in [0, 1], boundary included).
    """
    if per_member < 64:
        raise ParameterError("per_member must be at least 64")
    radii = np.linspace(0, 1, 17) if interior_radii is None else np.asarray(interior_radii, float)
    lat = polar_lattice(per_member, radii)
    idx = range(len(leaf)) if members is None else members
    pts, mem, zs = [], [], []
    for j in idx:
        pts.append(leaf.members[j](lat))
        mem.append(np.full(len(lat), j))
        zs.append(lat)
    return ClusterSample(np.concatenate(pts), np.concatenate(mem), np.concatenate(zs))


# ---------------------------------------------------------------- preimages


@dataclass
class PreimageCheck:
    nonempty: bool
    count: int
    best_zeta: complex
    best_gap: float


def preimage_grid_check(f: AnalyticMap, z, r: float, n_rho: int = 512, n_theta: int = 512) -> PreimageCheck:
    """Scan an (n_rho x n_theta) polar lattice for points of ``f^{-1}(B(z, r))``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    lat = polar_lattice(n_theta, np.linspace(0, 1, n_rho, endpoint=False))
    gap = np.linalg.norm(f(lat) - z, axis=-1) - r
    k = int(np.argmin(gap))
    inside = gap < 0
    return PreimageCheck(bool(inside.any()), int(inside.sum()), complex(lat[k]), float(gap[k]))


@dataclass
class EssentialityReport:
    z: np.ndarray
    r: float
    estimates: list
    ci95: list
    classification: str
    grid_nonempty: list
    low: float = LOW
    high: float = HIGH
    tail: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def is_essential(self) -> bool:
        """True for essential and totally-essential candidates alike."""
        return self.classification in ("essential", "totally-essential-candidate")

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "z": [[c.real, c.imag] for c in self.z],
            "r": self.r,
            "estimates": self.estimates,
            "ci95": self.ci95,
            "classification": self.classification,
            "is_essential": self.is_essential,
            "grid_nonempty": self.grid_nonempty,
            "thresholds": {"low": self.low, "high": self.high, "tail": "last third of members"},
            "tail": self.tail,
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def classify_tail(values, low: float = LOW, high: float = HIGH) -> str:
    """Threshold rules on tail estimates.

    nonessential if the tail max is below ``low``; totally-essential
    candidate if the tail min exceeds ``high``; essential if some tail value
    exceeds ``high``; inconclusive otherwise.
    """
    v = np.asarray(values, dtype=float)
    if v.max() < low:
        return "nonessential"
    if v.min() > high:
        return "totally-essential-candidate"
    if (v > high).any():
        return "essential"
    return "inconclusive"


def _member_seed(seed: int, j: int) -> int:
    return int(np.random.SeedSequence([seed & (2**64 - 1), j]).generate_state(1, dtype=np.uint64)[0])


def essentiality(leaf: FiniteLeaf, z, r: float, cfg: WalkConfig | None = None,
                 grid_check: bool = True) -> EssentialityReport:
    """Per-member harmonic measure at 0 of ``f_j^{-1}(B(z, r))`` and a tail classification."""
    if not r > 0:
        raise ParameterError("r must be positive")
    cfg = cfg or WalkConfig(walks=4000)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    est, ci, nonempty, warns = [], [], [], []
    for j, f in enumerate(leaf.members):
        c = WalkConfig(cfg.walks, cfg.eps_abs, cfg.max_steps, _member_seed(cfg.seed, j), cfg.max_step)
        res = harmonic_measure_interior(0.0, PreimageBall(f, z, r), c)
        est.append(res.estimate)
        ci.append(res.ci95)
        warns += [f"member {j}: {w}" for w in res.warnings]
        if grid_check:
            nonempty.append(preimage_grid_check(f, z, r).nonempty)
    tail = leaf.tail()
    cls = classify_tail([est[j] for j in tail])
    return EssentialityReport(z, float(r), est, ci, cls, nonempty, tail=tail, warnings=warns)


def essentiality_profile(leaf: FiniteLeaf, z, radii, cfg: WalkConfig | None = None) -> list[EssentialityReport]:
    """Essentiality at several radii from shared walks.

    Walks for one member are run once against the nested preimages, so the
    estimates are nondecreasing in the radius exactly.
    """
    cfg = cfg or WalkConfig(walks=4000)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    radii = [float(r) for r in radii]
    order = np.argsort(radii)[::-1]
    per_r = {i: ([], []) for i in range(len(radii))}
    for j, f in enumerate(leaf.members):
        c = WalkConfig(cfg.walks, cfg.eps_abs, cfg.max_steps, _member_seed(cfg.seed, j), cfg.max_step)
        res = harmonic_measure_nested(0.0, [PreimageBall(f, z, radii[i]) for i in order], c)
        for i, rr in zip(order, res):
            per_r[i][0].append(rr.estimate)
            per_r[i][1].append(rr.ci95)
    tail = leaf.tail()
    out = []
    for i, r in enumerate(radii):
        est, ci = per_r[i]
        out.append(EssentialityReport(z, r, est, ci, classify_tail([est[j] for j in tail]), [], tail=tail))
    return out


# ---------------------------------------------------------------- recentering


def _refine_preimage(f: AnalyticMap, z, a0: complex, iters: int = 50) -> complex:
    """Gauss-Newton on ||f(a) - z||^2 over |a| < 1, starting from a lattice point."""
    a = complex(a0)
    best = np.linalg.norm(f(a) - z)
    for _ in range(iters):
        res = f(a) - z
        d = f.derivative(a)
        nd = float(np.vdot(d, d).real)
        if nd == 0:
            break
        step = complex(np.vdot(d, res)) / nd
        cand = a - step
        if abs(cand) >= 1 - 1e-12:
            cand = a - step * (1 - 1e-12 - abs(a)) / max(abs(step), 1e-300)
        val = np.linalg.norm(f(cand) - z)
        if not val < best:
            break
        a, best = cand, val
        if best < 1e-15:
            break
    return a


def recenter(leaf: FiniteLeaf, z, tol: float, n_rho: int = 512, n_theta: int = 512) -> FiniteLeaf:
    """Subleaf ``f_j o G_{a_j}`` at recorded preimages ``f_j(a_j) ~ z``.

    Members without a lattice point within ``tol`` of ``z`` are dropped.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    lat = polar_lattice(n_theta, np.linspace(0, 1, n_rho, endpoint=False))
    out = []
    for f in leaf.members:
        gap = np.linalg.norm(f(lat) - z, axis=-1)
        k = int(np.argmin(gap))
        if gap[k] >= tol:
            continue
        a = _refine_preimage(f, z, lat[k])
        out.append(MoebiusPrecompose(f, a))
    if not out:
        raise EmptyLeafError(f"no member passes within {tol} of the point")
    sub = FiniteLeaf(out, leaf.radius)
    return sub


# ---------------------------------------------------------------- one-dimensional tests


def _occupancy(points: np.ndarray, h: float, pad: int = 2):
    lo = points.min(axis=0) - pad * h
    idx = np.floor((points - lo) / h).astype(int)
    shape = idx.max(axis=0) + pad + 1
    grid = np.zeros(shape, dtype=bool)
    grid[idx[:, 0], idx[:, 1]] = True
    return grid, lo


def _dense_lattice(leaf: FiniteLeaf, h: float, cap: int = 1500):
    L = max(max(lipschitz_bound(m) for m in leaf.members), 1e-12)
    step = h / (2 * L)
    n_r = int(min(cap, np.ceil(1 / step) + 1))
    n_t = int(min(4 * cap, np.ceil(2 * np.pi / step) + 1))
    return polar_lattice(n_t, np.linspace(0, 1, n_r))


@dataclass
class SupportReport:
    status: str
    excess: float
    h: float
    boundary_cells: int
    stabilization: float

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, **self.__dict__}


def boundary_support_test_1d(leaf: FiniteLeaf, support_samples, h: float = 0.02,
                             grid: int = 4096, members=None) -> SupportReport:
    """Check that the boundary of the sampled cluster lies near the support.

    The cluster of the chosen members (default: the last third) is rasterised
    at resolution ``h``; occupied cells with an empty 4-neighbour form the
    boundary.  PASS when every boundary cell center is within ``3 h`` of
    ``support_samples``.  Inconclusive when the last two member measures
    still differ by 1e-2 or more in weak distance.
    """
    if leaf.dim != 1:
        raise DimensionError("the boundary/support test is one-dimensional")
    mus = [pushforward(leaf.members[j], grid) for j in (-2, -1)] if len(leaf) > 1 else []
    stab = weak_distance(moments(mus[0], 4), moments(mus[1], 4), 4) if mus else 0.0
    if stab >= 1e-2:
        return SupportReport("inconclusive", float("nan"), h, 0, float(stab))
    idx = leaf.tail() if members is None else members
    lat = _dense_lattice(leaf, h)
    pts = np.concatenate([leaf.members[j](lat)[:, 0] for j in idx])
    xy = np.stack([pts.real, pts.imag], axis=1)
    occ, lo = _occupancy(xy, h)
    inner = ndimage.binary_erosion(occ, structure=ndimage.generate_binary_structure(2, 1))
    bd = occ & ~inner
    ii, jj = np.nonzero(bd)
    centers = lo + (np.stack([ii, jj], axis=1) + 0.5) * h
    sup = np.atleast_1d(np.asarray(support_samples, dtype=complex)).ravel()
    tree = cKDTree(np.stack([sup.real, sup.imag], axis=1))
    d, _ = tree.query(centers)
    excess = float(d.max()) if len(d) else 0.0
    return SupportReport("PASS" if excess < 3 * h else "FAIL", excess, h, int(len(d)), float(stab))


def cluster_covers_ball(leaf: FiniteLeaf, center, radius: float, h: float = 0.02, members=None):
    """Fraction of grid cells of ``B(center, radius)`` (C^1) hit by cluster samples.

    Returns (covered fraction, number of uncovered cells).
    """
    if leaf.dim != 1:
        raise DimensionError("ball coverage is checked in the plane")
    idx = leaf.tail() if members is None else members
    lat = _dense_lattice(leaf, h)
    pts = np.concatenate([leaf.members[j](lat)[:, 0] for j in idx])
    c = complex(center)
    m = int(np.ceil(radius / h))
    ax = (np.arange(-m, m) + 0.5) * h
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    # cells entirely inside the ball
    cells = (np.hypot(np.abs(gx) + h / 2, np.abs(gy) + h / 2) <= radius)
    hit = np.zeros_like(cells)
    rel = pts - c
    ix = np.floor(rel.real / h).astype(int) + m
    iy = np.floor(rel.imag / h).astype(int) + m
    ok = (ix >= 0) & (ix < 2 * m) & (iy >= 0) & (iy < 2 * m)
    hit[ix[ok], iy[ok]] = True
    total = int(cells.sum())
    missing = int((cells & ~hit).sum())
    return (1.0 if total == 0 else 1 - missing / total), missing


# ---------------------------------------------------------------- midrib


@dataclass
class MidribConfig:
    """Settings of the midrib diagnostic.

    Attributes
    ----------
    resolution : planar grid cells along the longer side
    walks, seed, max_steps : Monte-Carlo budget
    support_grid : boundary samples per member for the support
    per_member : cluster lattice angles per member
    injectivity_radius : cluster samples within this distance of the center
        are used for the injectivity check
    min_hits : hits needed to call the estimate positive
    """

    resolution: int = 512
    walks: int = 4000
    seed: int = 0
    max_steps: int = 5000
    support_grid: int = 4096
    per_member: int = 256
    injectivity_radius: float = 0.5
    min_hits: int = 10


@dataclass
class MidribReport:
    status: str
    estimate: float
    ci95: float
    hits: int
    walks: int
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "status": self.status, "estimate": self.estimate,
                "ci95": self.ci95, "hits": self.hits, "walks": self.walks, "details": self.details}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def midrib_test(leaf: FiniteLeaf, h, z, W_radius: float, cfg: MidribConfig | None = None,
                W_center=None) -> MidribReport:
    """Planar harmonic-measure evidence that ``z`` belongs to the midrib.

    With ``h`` a scalar polynomial, ``K'`` is the component of the plane
    minus ``h(support)`` containing ``h(z_L)``; walks from ``h(z)`` inside
    ``K'`` are counted when they reach ``h(W cap cluster)`` with ``W`` the
    ball of radius ``W_radius`` around the leaf center.  The support and
    cluster are taken from the last third of the members.

    The statement this diagnostic follows is ambiguous about which point is
    asserted to lie in the midrib; the test implements the harmonic-measure
    argument at ``z``.
    """
    cfg = cfg or MidribConfig()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zl = leaf.center() if W_center is None else np.atleast_1d(np.asarray(W_center, dtype=complex))
    tail = leaf.tail()
    support = np.concatenate([leaf.members[j].boundary(cfg.support_grid) for j in tail])
    cl = cluster_sample(leaf, cfg.per_member, np.linspace(0, 1, 65), members=tail)
    details = {}

    d_support = float(np.min(np.linalg.norm(support - zl, axis=1)))
    details["center_to_support"] = d_support
    if d_support < 1e-6:
        return MidribReport("inconclusive", 0.0, 0.0, 0, 0, {**details, "reason": "center lies on the support"})

    # injectivity of h near the center, on the tail cluster samples
    near = np.linalg.norm(cl.points - zl, axis=1) < cfg.injectivity_radius
    if near.sum() > 1:
        pn = cl.points[near]
        hv = h(pn)
        tree = cKDTree(np.stack([hv.real, hv.imag], axis=1))
        pairs = tree.query_pairs(1e-9, output_type="ndarray")
        if len(pairs):
            sep = np.linalg.norm(pn[pairs[:, 0]] - pn[pairs[:, 1]], axis=1)
            details["injectivity_defect"] = float(sep.max())
            if sep.max() > 1e-3:
                return MidribReport("inconclusive", 0.0, 0.0, 0, 0, {**details, "reason": "h is not injective near the center"})

    hs = h(support)
    hz = complex(h(z[None, :])[0])
    hzl = complex(h(zl[None, :])[0])
    in_w = np.linalg.norm(cl.points - zl, axis=1) < W_radius
    ht = h(cl.points[in_w]) if in_w.any() else np.zeros(0, dtype=complex)

    allp = np.concatenate([hs, [hz, hzl], ht])
    lo = np.array([allp.real.min(), allp.imag.min()])
    hi = np.array([allp.real.max(), allp.imag.max()])
    span = float(max(hi - lo)) or 1.0
    cell = span / cfg.resolution
    lo = lo - 4 * cell
    shape = np.ceil((hi - lo) / cell).astype(int) + 5

    def to_idx(w):
        w = np.atleast_1d(w)
        ij = np.floor((np.stack([w.real, w.imag], axis=-1) - lo) / cell).astype(int)
        return np.clip(ij, 0, shape - 1)

    blocked = np.zeros(shape, dtype=bool)
    bi = to_idx(hs)
    blocked[bi[:, 0], bi[:, 1]] = True
    blocked = ndimage.binary_dilation(blocked)
    labels, _ = ndimage.label(~blocked)
    izl = to_idx(hzl)[0]
    comp = labels[izl[0], izl[1]]
    if comp == 0:
        return MidribReport("inconclusive", 0.0, 0.0, 0, 0, {**details, "reason": "h(z_L) lies on h(support)"})
    free = labels == comp
    iz = to_idx(hz)[0]
    if not free[iz[0], iz[1]]:
        return MidribReport("not-in-component", 0.0, 0.0, 0, 0, details)
    target = np.zeros(shape, dtype=bool)
    if len(ht):
        ti = to_idx(ht)
        target[ti[:, 0], ti[:, 1]] = True
    target &= free
    details["target_cells"] = int(target.sum())
    if not target.any():
        return MidribReport("inconclusive", 0.0, 0.0, 0, 0, {**details, "reason": "empty target"})

    # distances (in cells) to the complement of K' and to the target
    d_out = ndimage.distance_transform_edt(free) * cell
    d_tgt = ndimage.distance_transform_edt(~target) * cell
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 31337]))
    pos = np.full(cfg.walks, hz)
    active = np.ones(cfg.walks, dtype=bool)
    hit = np.zeros(cfg.walks, dtype=bool)
    for _ in range(cfg.max_steps):
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        ij = to_idx(pos[idx])
        do = d_out[ij[:, 0], ij[:, 1]] - cell
        dt = d_tgt[ij[:, 0], ij[:, 1]] - cell
        got = dt <= 0
        hit[idx[got]] = True
        gone = got | (do <= 0)
        active[idx[gone]] = False
        idx, do, dt = idx[~gone], do[~gone], dt[~gone]
        rad = np.minimum(do, dt)
        pos[idx] += rad * np.exp(1j * rng.uniform(0, 2 * np.pi, len(idx)))
    hits = int(hit.sum())
    p = hits / cfg.walks
    ci = 1.96 * np.sqrt(p * (1 - p) / cfg.walks)
    details["exhausted"] = int(active.sum())
    status = "positive" if hits >= cfg.min_hits and p - ci > 0 else "inconclusive"
    return MidribReport(status, float(p), float(ci), hits, cfg.walks, details)
