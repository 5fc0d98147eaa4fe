"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import filecmp
import json

import numpy as np

from anadisk import (
    BlaschkePrecompose,
    MultiPoly,
    Polynomial,
    jensen_check,
    moments,
    pushforward,
    random_bremermann,
    weak_distance,
)
from anadisk.cli import main
from anadisk.envelope import (
    Ball,
    BoundaryData,
    NormPower,
    PolyZZbar,
    default_probe_dictionary,
    maximality_check,
    poletsky_value,
)
from anadisk.errors import DegenerateGeometryError
from anadisk.gluing import GlueConfig, convergence_profile, glue
from anadisk.hull import CompactSet, hull_classify, membership_search, separation_search
from anadisk.leaves import essentiality, torus_leaf, linear_disk_leaf, midrib_test, torus_haar_moments
from anadisk.potential import (
    ArcSet,
    DiskTarget,
    Lemma42Inputs,
    WalkConfig,
    harmonic_measure_arc,
    harmonic_measure_arc_mc,
    harmonic_measure_interior,
    lemma42_constants,
    two_constant_bound,
)

from conftest import random_poly, record
from oracles import GLUE_MIXTURE_M11, grid_laplace, lemma_constants_direct, two_constant_direct

F = Polynomial([0, 1])
G = Polynomial([0, 2])


def test_criterion_01_inner_invariance():
    rng = np.random.default_rng(101)
    worst = 0.0
    for i in range(20):
        f = random_poly(rng, 1 + i % 2, int(rng.integers(1, 4)))
        k = int(rng.integers(1, 4))
        extra = 0.9 * np.sqrt(rng.uniform(size=k - 1)) * np.exp(2j * np.pi * rng.uniform(size=k - 1))
        g = BlaschkePrecompose(f, np.concatenate([[0], extra]))
        worst = max(worst, weak_distance(pushforward(f, 200_000), pushforward(g, 200_000), 4))
    assert record(1, "inner invariance", worst < 2e-3, f"max weak distance {worst:.3e} < 2e-3")


def test_criterion_02_gluing_convergence():
    N = 200_000
    p = glue(F, G, GlueConfig(alpha=0.5, r=1e-3))
    m11 = moments(pushforward(p, N), 2)[((1,), (1,))].real
    rows = convergence_profile(F, G, 0.5, [1e-1, 1e-2, 1e-3], n=N)
    d = [r.distance for r in rows]
    ok_m = abs(m11 - GLUE_MIXTURE_M11) < 0.05 * GLUE_MIXTURE_M11
    ok_p = all(b < a - 2 / np.sqrt(N) for a, b in zip(d, d[1:]))
    detail = f"(1,1) moment {m11:.4f} vs 2.5; profile {[round(x, 4) for x in d]}"
    assert record(2, "gluing convergence", ok_m and ok_p, detail)


def test_criterion_03_glued_jensen():
    rng = np.random.default_rng(303)
    glued = [(glue(F, G, r=r), F.center()) for r in (1e-1, 1e-2, 1e-3, 1e-4)]
    for _ in range(4):
        f = random_poly(rng, 2, int(rng.integers(1, 4)), 2.0)
        g = random_poly(rng, 2, int(rng.integers(1, 4)), 2.0)
        g = Polynomial(np.concatenate([f.coeffs[:, :1], g.coeffs[:, 1:]], axis=1))
        glued.append((glue(f, g, r=1e-3, alpha=float(rng.uniform(0.2, 0.8)), ambient_radius=1e6), f.center()))
    failures = 0
    for p, c in glued:
        probes = random_bremermann(p.dim, 100, rng)
        failures += not jensen_check(pushforward(p, 50_000), c, probes, slack=5e-2).passed
    assert record(3, "Jensen property of glued measures", failures == 0,
                  f"{len(glued) - failures}/{len(glued)} measures pass 100 probes at slack 5e-2")


def test_criterion_04_envelope_oracles():
    B1, B2 = Ball.unit(1), Ball.unit(2)
    phi = BoundaryData(PolyZZbar.real_part(0, 1), B1)
    err1 = max(abs(poletsky_value(phi, [z], B1).value - z.real) for z in (0j, 0.5, -0.5, 0.5j, -0.5j))
    rng = np.random.default_rng(404)
    err2 = 0.0
    for _ in range(5):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z *= rng.uniform(0.1, 0.9) / np.linalg.norm(z)
        err2 = max(err2, abs(poletsky_value(NormPower(2), z, B2).value - np.linalg.norm(z) ** 2))
    assert record(4, "envelope oracles", err1 < 1e-2 and err2 < 2e-2,
                  f"Poisson error {err1:.2e} < 1e-2, fixed-point error {err2:.2e} < 2e-2")


def test_criterion_05_hull_classification():
    circle, torus = CompactSet.circle(), CompactSet.torus()
    c0, c5, c15 = (hull_classify(circle, z) for z in (0.0, 0.5, 1.5))
    ct = hull_classify(torus, [0, 0])
    ok = (c0.kind == c5.kind == "membership" and c0.outside_fraction < 1e-2 and c5.outside_fraction < 1e-2
          and c15.kind == "separation" and c15.margin >= 1.4
          and ct.kind == "membership" and ct.disk.degree <= 8)
    both = []
    for K, z, cert in ((circle, 0.0, c0), (circle, 0.5, c5), (circle, 1.5, c15), (torus, [0, 0], ct)):
        if cert.kind == "membership":
            other = any(separation_search(K, z, d).kind == "separation" for d in (1, 2, 4))
        else:
            other = membership_search(K, z).kind == "membership"
        if other:
            both.append(z)
    detail = (f"circle 0:{c0.kind} 0.5:{c5.kind} (deg {c5.disk.degree}) 1.5:{c15.kind} margin {c15.margin:.3f}; "
              f"torus:{ct.kind} deg {ct.disk.degree}; double certificates {len(both)}")
    assert record(5, "hull classification", ok and not both, detail)


def test_criterion_06_formula_evaluators():
    rng = np.random.default_rng(606)
    worst_tc = worst_l = 0.0
    n = 0
    while n < 1000:
        m, M = sorted(rng.uniform(1e-3, 10, 2))
        d = rng.uniform()
        worst_tc = max(worst_tc, abs(two_constant_bound(m, M, d) - two_constant_direct(m, M, d)) / M)
        R = rng.uniform(0.5, 5)
        b = rng.uniform(0.05, 0.95) * R
        k = rng.uniform(1.01, 10)
        r = rng.uniform(0.01, 0.99) * b / k
        a = rng.uniform(1e-3, 1)
        try:
            got = lemma42_constants(Lemma42Inputs(k, r, R, a, b))
        except DegenerateGeometryError:
            continue
        ref = lemma_constants_direct(k, r, R, a, b)
        worst_l = max(worst_l, max(abs(x - y) for x, y in zip((got.s, got.m, got.t, got.c), ref)))
        n += 1
    raised = 0
    out_of_regime = [Lemma42Inputs(2, 0.05, 2, 0.8, 1), Lemma42Inputs(2, 0.2, 2, 0.3, 3),
                     Lemma42Inputs(5, 0.3, 2, 0.5, 1), Lemma42Inputs(2, 0.2, 2, 5e-324, 1)]
    for inp in out_of_regime:
        try:
            lemma42_constants(inp)
        except DegenerateGeometryError:
            raised += 1
    ok = worst_tc < 1e-12 and worst_l < 1e-12 and raised == len(out_of_regime)
    assert record(6, "formula evaluators", ok,
                  f"two-constant dev {worst_tc:.1e}, lemma dev {worst_l:.1e}, degenerate raised {raised}/4")


def test_criterion_07_harmonic_measure_kernels():
    rng = np.random.default_rng(707)
    err_arc = 0.0
    for i in range(10):
        zeta = rng.uniform(0, 0.8) * np.exp(2j * np.pi * rng.uniform())
        a = rng.uniform(0, 2 * np.pi)
        arcs = ArcSet([(a, a + rng.uniform(0.3, 3.0))])
        mc = harmonic_measure_arc_mc(zeta, arcs, WalkConfig(walks=100_000, seed=i))
        err_arc = max(err_arc, abs(mc.estimate - harmonic_measure_arc(zeta, arcs)))
    configs = [(0j, 0.5, 0.1), (0.3j, -0.4, 0.2), (0.2 + 0j, 0.6j, 0.15), (-0.5 + 0j, 0.3 + 0.3j, 0.25),
               (0.1 - 0.2j, -0.5j, 0.1)]
    err_int = 0.0
    for zeta, c, r in configs:
        mc = harmonic_measure_interior(zeta, DiskTarget(c, r), WalkConfig(walks=100_000))
        ref = grid_laplace(zeta, lambda w: np.abs(w - c) < r, 401)
        err_int = max(err_int, abs(mc.estimate - ref))
    assert record(7, "harmonic-measure kernels", err_arc < 1e-2 and err_int < 2e-2,
                  f"arc error {err_arc:.2e} < 1e-2, interior error {err_int:.2e} < 2e-2")


def test_criterion_08_example_suite():
    leaf = torus_leaf(20)
    N = 4096
    mv = moments(pushforward(leaf.members[-1], N), 4)
    dev = max(abs(mv[k] - v) for k, v in torus_haar_moments(4).items())
    cfg = WalkConfig(walks=4000)
    ess = essentiality(leaf, [0.3, 0], 0.1, cfg)
    non = essentiality(leaf, [0.5, 0.5], 0.1, cfg)
    grid_agrees = not any(non.grid_nonempty[j] for j in non.tail) and all(ess.grid_nonempty[j] for j in ess.tail)
    mid = midrib_test(leaf, MultiPoly.coordinate(2, 0), [0.3, 0], 0.2)
    ok = dev < 2 / np.sqrt(N) and ess.is_essential and non.classification == "nonessential" \
        and grid_agrees and mid.status == "positive"
    detail = (f"moment dev {dev:.1e}; (0.3,0): {ess.classification}; (0.5,0.5): {non.classification}; "
              f"grid agrees {grid_agrees}; midrib {mid.status} ({mid.estimate:.3f} +- {mid.ci95:.3f})")
    assert record(8, "torus leaf suite", ok, detail)


def test_criterion_09_maximality_checker():
    s = 0.8 / np.sqrt(2)
    leaf = linear_disk_leaf([0, 0], [[0.8, 0], [0, 0.8], [s, s], [s, -1j * s]])
    probes = default_probe_dictionary(2, 50, np.random.default_rng(909), center=leaf.center())
    radii = np.linspace(0, 1, 41)
    re = maximality_check(lambda z: np.real(np.asarray(z)[..., 0]), leaf, 0.5, 1.0, probes, interior_radii=radii)
    sq = maximality_check(lambda z: np.sum(np.abs(np.asarray(z)) ** 2, axis=-1), leaf, 0.5, 1.0, probes,
                          interior_radii=radii)
    ok = len(re.violations) == 0 and len(sq.violations) >= 1
    assert record(9, "maximality checker", ok,
                  f"Re z1: {len(re.violations)} violations; ||z||^2: {len(sq.violations)} violations")


def test_criterion_10_reproducibility(tmp_path):
    poly = lambda c: {"type": "poly", "coeffs": [[[0, 0], [c, 0]]]}
    cfg = {
        "schema_version": 1, "seed": 1010,
        "measure": {"maps": [poly(1)], "probes": 20, "grid_n": 2048},
        "glue": {"f": poly(1), "g": poly(2), "r_list": [0.1, 0.01], "n": 20000},
        "envelope": {"function": {"kind": "real_part", "boundary": True}, "points": [0.3], "degrees": [1, 2],
                     "restarts": 2},
        "hull": {"K": {"kind": "circle", "m": 512}, "points": [0, 1.5], "degrees": [1, 2], "restarts": 2},
        "leaf": {"leaf": {"kind": "torus_leaf", "J": 6}, "queries": [{"z": [0.3, 0], "r": 0.1}],
                 "walks": 1000, "per_member": 64},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    codes = [main(["run", str(path), "--out", str(tmp_path / d)]) for d in ("a", "b")]
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    leaf = torus_leaf(6)
    runs = [essentiality(leaf, [0.3, 0], 0.1, WalkConfig(walks=1000, seed=7)).to_json() for _ in range(2)]
    ok = codes == [0, 0] and not mismatch and not errors and len(match) == len(names) and runs[0] == runs[1]
    assert record(10, "reproducibility", ok,
                  f"{len(match)}/{len(names)} CLI artifacts bit-identical; repeated essentiality identical "
                  f"{runs[0] == runs[1]}")
