"""Gluing two disks into one whose measure approximates a convex combination.

Given disks ``f`` and ``g`` with a common center ``c`` and a weight
``alpha``, the ring map ``h(w) = f(w) + g(r/w) - c`` is holomorphic on
``r <= |w| <= 1``.  On the outer circle ``g(r/w)`` is within ``O(r)`` of
``c`` and on the inner circle ``f(w)`` is, so ``h`` copies ``f`` outside and
``g`` inside.  Precomposing with a conformal map ``e`` of the unit disk onto
the ring which sends a boundary arc of measure ``alpha`` onto ``|w| = 1``
gives a disk ``p = h o e`` with
``mu(p) -> alpha mu(f) + (1 - alpha) mu(g)`` as ``r -> 0``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .disk import (
    AnalyticMap,
    AnnulusSum,
    BoundaryGrid,
    StripExpPrecompose,
    strip_exp,
    sup_norm,
)
from .errors import ContainmentError, ParameterError, PreconditionError
from .measures import mixture, pushforward, weak_distance

CENTER_TOL = 1e-9
DEFAULT_R_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class StripMapSpec:
    """Normalisation of the ring map: ``e(0) = r**(1 - alpha)``, ``e(1) = 1``."""

    r: float
    alpha: float

    def __post_init__(self):
        if not (self.r > 1e-12 and self.r < 1):
            raise ParameterError(f"ring radius must lie in (1e-12, 1), got {self.r}")
        if not 0 < self.alpha < 1:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def origin_image(self) -> complex:
        """exp((1 - alpha) ln r), the image of 0."""
        return complex(strip_exp(0.0, self.r, self.alpha))


@dataclass(frozen=True)
class GlueConfig:
    """Parameters of one gluing step.

    Attributes
    ----------
    alpha : weight of the first disk, in (0, 1)
    r : inner ring radius; smaller is more accurate
    grid : boundary grid used for containment checks
    ambient_radius : radius of the ball the glued image must stay in.
        ``None`` uses ``2 * max(sup f, sup g)``.
    recenter : shift the glued disk so that ``p(0)`` equals the common center
        exactly instead of only up to ``O(r**(1 - alpha))``.
    """

    alpha: float = 0.5
    r: float = 1e-3
    grid: BoundaryGrid = field(default_factory=lambda: BoundaryGrid(4096))
    ambient_radius: float | None = None
    recenter: bool = True

    def __post_init__(self):
        StripMapSpec(self.r, self.alpha)
        if self.ambient_radius is not None and not self.ambient_radius > 0:
            raise ParameterError("ambient radius must be positive")


def strip_exp_map(spec: StripMapSpec) -> StripExpPrecompose:
    """The disk-to-ring map ``e`` as a scalar analytic map."""
    return StripExpPrecompose(None, spec.r, spec.alpha)


def boundary_split(spec: StripMapSpec, grid: BoundaryGrid | int = 4096) -> tuple[float, float]:
    """Fractions of boundary samples landing on ``|w| = 1`` and ``|w| = r``.

    A sample counts for the outer circle when its modulus exceeds ``sqrt(r)``
    (the geometric midpoint of the ring).
    """
    if not isinstance(grid, BoundaryGrid):
        grid = BoundaryGrid(int(grid))
    w = strip_exp(grid.points, spec.r, spec.alpha)
    outer = float(np.mean(np.abs(w) > np.sqrt(spec.r)))
    return outer, 1.0 - outer


def glue(f: AnalyticMap, g: AnalyticMap, cfg: GlueConfig | None = None, **kw) -> StripExpPrecompose:
    """Single disk whose measure approximates ``alpha mu(f) + (1-alpha) mu(g)``.

    Parameters
    ----------
    f, g : disks with equal centers (within 1e-9)
    cfg : :class:`GlueConfig`; keyword arguments build one when omitted

    Returns
    -------
    StripExpPrecompose
        ``AnnulusSum(f, g) o e``, kept as an exact composite.

    Raises
    ------
    PreconditionError
        If the centers differ.
    ContainmentError
        If the sampled image leaves the ambient ball.
    """
    if cfg is None:
        cfg = GlueConfig(**kw)
    elif kw:
        raise ParameterError("pass either a GlueConfig or keyword arguments")
    if f.dim != g.dim:
        raise PreconditionError("glued disks live in different dimensions")
    c = f.center()
    cg = g.center()
    if np.linalg.norm(c - cg) > CENTER_TOL:
        raise PreconditionError(f"centers differ by {np.linalg.norm(c - cg):.3e}")
    if cfg.recenter:
        e0 = strip_exp(0.0, cfg.r, cfg.alpha)
        offset = c - f(e0) - g(cfg.r / e0)
    else:
        offset = -c
    p = StripExpPrecompose(AnnulusSum(f, g, cfg.r, offset), cfg.r, cfg.alpha)

    bound = cfg.ambient_radius
    if bound is None:
        bound = 2.0 * max(sup_norm(f, cfg.grid, refine=False), sup_norm(g, cfg.grid, refine=False))
    sup = float(np.max(np.linalg.norm(p.boundary(cfg.grid), axis=-1)))
    if sup > bound:
        raise ContainmentError(
            f"glued image reaches radius {sup:.6g} outside the ambient ball of radius {bound:.6g} "
            f"at r = {cfg.r:g}; retry with a smaller r",
            radius=cfg.r,
            sup=sup,
        )
    return p


@dataclass(frozen=True)
class ProfileRow:
    r: float
    distance: float
    n: int
    seed: int


def convergence_profile(f: AnalyticMap, g: AnalyticMap, alpha: float,
                        r_list=DEFAULT_R_SCHEDULE, n: int = 200_000, dmax: int = 4,
                        seed: int = 0, recenter: bool = True,
                        ambient_radius: float | None = None) -> list[ProfileRow]:
    """Weak distance of each glued measure to the target mixture.

    The computation is deterministic; ``seed`` is only recorded so that
    rows can be joined with seeded experiments.
    """
    r_list = [float(r) for r in r_list]
    if not r_list:
        raise ParameterError("empty r schedule")
    if any(not 0 < r < 1 for r in r_list) or any(b >= a for a, b in zip(r_list, r_list[1:])):
        raise ParameterError("r schedule must be strictly decreasing inside (0, 1)")
    grid = BoundaryGrid(n)
    target = mixture(pushforward(f, grid), pushforward(g, grid), alpha)
    rows = []
    for r in r_list:
        p = glue(f, g, GlueConfig(alpha=alpha, r=r, grid=grid, recenter=recenter,
                                  ambient_radius=ambient_radius))
        d = weak_distance(pushforward(p, grid), target, dmax)
        rows.append(ProfileRow(r, d, n, int(seed)))
    return rows


def profile_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "distance", "N", "seed"])
    for row in rows:
        w.writerow([repr(row.r), repr(row.distance), row.n, row.seed])
    return buf.getvalue()
