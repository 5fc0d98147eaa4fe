import json
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anadisk import Polynomial
from anadisk.errors import ParameterError
from anadisk.hull import (
    CompactSet,
    HullCertificate,
    HullConfig,
    _center_excluded,
    hull_classify,
    membership_search,
    outside_fraction,
    pluriharmonic_measure_estimate,
    separation_search,
)

FAST = HullConfig(degrees=(1, 2), restarts=2, patience=1, eps_factors=(2.0, 1.0))


def test_compact_set_defaults_and_csv():
    K = CompactSet.circle(256)
    assert K.eps == pytest.approx(0.04, rel=1e-3)
    back = CompactSet.from_csv(K.to_csv())
    np.testing.assert_array_equal(back.samples, K.samples)
    assert K.distance(np.array([[0.0]]))[0] == pytest.approx(1.0)


def test_circle_center_membership():
    K = CompactSet.circle()
    c = hull_classify(K, 0)
    assert c.kind == "membership" and c.outside_fraction < 1e-2 and c.verify(K)


def test_circle_outside_separation():
    K = CompactSet.circle()
    c = hull_classify(K, 1.5)
    assert c.kind == "separation" and c.margin >= 1.4 and c.verify(K)


def test_two_points_midpoint_separated():
    K = CompactSet.points([0, 1])
    c = separation_search(K, 0.5, 2)
    assert c.kind == "separation" and c.verify(K)


def test_segment_point_membership():
    K = CompactSet.segment(m=501)
    c = membership_search(K, 0.0, FAST)
    assert c.kind == "membership" and c.verify(K)


def test_certificate_round_trip():
    K = CompactSet.circle(512)
    for z in (0.0, 1.5):
        c = hull_classify(K, z, FAST)
        d = json.loads(c.to_json())
        assert d["schema_version"] == 1
        back = HullCertificate.from_dict(d)
        assert back.kind == c.kind and back.verify(K)


@pytest.mark.parametrize("K,zs", [
    (CompactSet.circle(512), [0.3, 1.2]),
    (CompactSet.segment(m=501), [0.0, 0.5j]),
    (CompactSet.points([0, 1]), [0.5, 2.0]),
    (CompactSet.torus(48), [[0.2, 0.1], [1.5, 0.0]]),
])
def test_no_point_gets_both_certificates(K, zs):
    for z in zs:
        sep = any(separation_search(K, z, d, FAST).kind == "separation" for d in (1, 2))
        mem = membership_search(K, z, FAST).kind == "membership"
        assert not (sep and mem)


@given(st.floats(0.001, 0.5), st.floats(0.001, 0.5), st.floats(-1, 1), st.floats(-1, 1))
def test_outside_fraction_monotone_in_eps(e1, e2, a, b):
    K = CompactSet.circle(256)
    f = Polynomial([complex(a, b), 0.7, 0.2j])
    lo, hi = sorted((e1, e2))
    assert outside_fraction(f, K, 256, hi) <= outside_fraction(f, K, 256, lo)


def test_config_validation():
    with pytest.raises(ParameterError):
        HullConfig(degrees=())
    with pytest.raises(ParameterError):
        HullConfig(eps_factors=(2.0, 0.5))


def test_pluriharmonic_measure_bounds():
    E = CompactSet.circle(512)
    inside = pluriharmonic_measure_estimate(0, E, 3.0, FAST)
    assert inside.value == pytest.approx(-1.0, abs=1e-2)
    outside = pluriharmonic_measure_estimate(2.0, E, 3.0, FAST)
    assert -1.0 <= outside.value <= 0.0 and outside.value > inside.value


def test_membership_skips_points_outside_convex_hull():
    t = time.time()
    cert = membership_search(CompactSet.circle(), 1.5)
    assert cert.kind == "unknown" and "convex hull" in cert.notes[0]
    assert time.time() - t < 1.0


def test_convex_precheck_never_excludes_hull_points():
    K = CompactSet.circle()
    for z in (0.0, 0.5, 0.99j, -0.7 + 0.7j):
        assert _center_excluded(K, np.atleast_1d(complex(z)), 2.0, 1e-2) is None
    T = CompactSet.torus()
    assert _center_excluded(T, np.array([0.9, -0.9j]), 2.0, 1e-2) is None
