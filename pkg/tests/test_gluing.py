import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anadisk import Polynomial, center, jensen_check, moments, pushforward, random_bremermann, sup_norm
from anadisk.disk import lipschitz_bound
from anadisk.errors import ContainmentError, ParameterError, PreconditionError
from anadisk.gluing import (
    GlueConfig,
    StripMapSpec,
    boundary_split,
    convergence_profile,
    glue,
    profile_csv,
)

from conftest import random_poly
from oracles import GLUE_MIXTURE_M11

F = Polynomial([0, 1])
G = Polynomial([0, 2])


def same_center_pair(rng, n, scale=2.0):
    f = random_poly(rng, n, int(rng.integers(1, 4)), scale)
    g = random_poly(rng, n, int(rng.integers(1, 4)), scale)
    g = Polynomial(np.concatenate([f.coeffs[:, :1], g.coeffs[:, 1:]], axis=1))
    return f, g


def test_boundary_split_is_alpha():
    out, inn = boundary_split(StripMapSpec(1e-3, 0.5), 4096)
    assert abs(out - 0.5) < 1e-3 and abs(out + inn - 1) < 1e-15


def test_parameter_checks():
    with pytest.raises(ParameterError):
        StripMapSpec(0.0, 0.5)
    with pytest.raises(ParameterError):
        StripMapSpec(1e-3, 1.0)
    with pytest.raises(PreconditionError):
        glue(F, Polynomial([1, 1]))
    with pytest.raises(ParameterError):
        convergence_profile(F, G, 0.5, [1e-3, 1e-2])


def test_containment_error_carries_radius():
    with pytest.raises(ContainmentError) as info:
        glue(F, G, r=0.1, ambient_radius=0.5)
    assert info.value.radius == 0.1 and info.value.sup > 0.5


def test_mixture_moment():
    p = glue(F, G, r=1e-3, alpha=0.5, grid=200_000)
    m11 = moments(pushforward(p, 200_000), 2)[((1,), (1,))].real
    assert abs(m11 - GLUE_MIXTURE_M11) < 0.05 * GLUE_MIXTURE_M11


def test_profile_strictly_improves_and_csv():
    rows = convergence_profile(F, G, 0.5, [1e-1, 1e-2, 1e-3, 1e-4], n=200_000)
    d = [r.distance for r in rows]
    assert all(b < a - 2 / np.sqrt(2e5) for a, b in zip(d, d[1:]))
    text = profile_csv(rows)
    assert text.splitlines()[0] == "r,distance,N,seed" and len(text.splitlines()) == 5


def test_recentered_glue_keeps_center():
    p = glue(F, G, r=1e-3)
    np.testing.assert_allclose(p.center(), [0], atol=1e-12)
    np.testing.assert_allclose(center(pushforward(p, 200_000)), [0], atol=1e-3)


@given(st.integers(0, 2**32 - 1), st.floats(0.2, 0.8))
def test_unrecentered_center_drift_bound(seed, alpha):
    # p(0) - c = (f(e0) - c) + (g(r/e0) - c) with e0 = r**(1 - alpha)
    f, g = same_center_pair(np.random.default_rng(seed), 2)
    r = 1e-3
    p = glue(f, g, r=r, alpha=alpha, recenter=False, ambient_radius=1e6)
    drift = np.linalg.norm(p.center() - f.center())
    assert drift <= lipschitz_bound(f) * r ** (1 - alpha) + lipschitz_bound(g) * r**alpha + 1e-12


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 0.8))
def test_mixture_convergence_rate(seed, alpha):
    f, g = same_center_pair(np.random.default_rng(seed), int(np.random.default_rng(seed).integers(1, 3)))
    S = max(sup_norm(f), sup_norm(g), 1.0)
    rows = convergence_profile(f, g, alpha, [1e-2, 1e-3, 1e-4], n=50_000, ambient_radius=1e6)
    e = min(alpha, 1 - alpha)
    assert rows[-1].distance <= 0.5 * rows[-1].r ** e * S**4
    assert rows[-1].distance < rows[0].distance


@pytest.mark.xfail(strict=True, reason="measured rate is r**min(alpha, 1 - alpha); 5e-2 is not reached at r = 1e-4")
def test_literal_mixture_bound_at_small_r():
    rows = convergence_profile(F, G, 0.5, [1e-4], n=200_000)
    assert rows[0].distance < 5e-2


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 0.8))
def test_glued_measure_is_jensen(seed, alpha):
    rng = np.random.default_rng(seed)
    f, g = same_center_pair(rng, 2)
    p = glue(f, g, r=1e-3, alpha=alpha, ambient_radius=1e6)
    rep = jensen_check(pushforward(p, 20_000), f.center(), random_bremermann(2, 100, rng), slack=5e-2)
    assert rep.passed, rep.violations
