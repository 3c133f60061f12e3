"""End-to-end smoke tests of the python bindings."""

import json
import math

import pytest

import mslab


def test_example_registry():
    ids = mslab.example_ids()
    assert set(ids) == {
        "euclidean",
        "exp-weight",
        "grushin-glued",
        "spikes-cones",
        "spikes-cylinders",
    }
    for space in ids:
        desc = json.loads(mslab.descriptor(space))
        assert desc["name"] == space


def test_euclidean_distance_is_euclidean():
    d = mslab.dist("euclidean", (0.0, 0.0), (1.0, 0.0), h=1.0 / 128.0)
    assert d == pytest.approx(1.0, abs=1e-9)
    path = mslab.geodesic("euclidean", (0.0, 0.0), (1.0, 0.0), h=1.0 / 128.0)
    assert len(path) >= 2
    assert path[0] == pytest.approx((0.0, 0.0))
    assert path[-1] == pytest.approx((1.0, 0.0))


def test_exp_weight_radial_law():
    d = mslab.dist("exp-weight", (0.0, 0.0), (0.5, 0.0), h=1.0 / 256.0)
    assert d == pytest.approx(math.exp(-2.0), rel=0.02)


def test_ball_areas_lebesgue():
    rows = mslab.ball_areas("euclidean", [0.0, 0.0, 0.0], [0.1, 0.2])
    assert [r for r, _ in rows] == [0.1, 0.2]
    for r, mu in rows:
        assert mu == pytest.approx(math.pi * r * r, rel=1e-9)


def test_q_dist_reduces_to_euclidean():
    # (0.75, 0.375) is a stencil direction; endpoint snap on the auto corridor
    # grid leaves a sub-percent gap, bounded well inside 3%.
    q = mslab.q_dist("euclidean", (0.0, 0.0), (0.75, 0.375), h=1.0 / 64.0)
    assert q == pytest.approx(math.hypot(0.75, 0.375), rel=0.03)


def test_mu_length_of_a_segment():
    est = mslab.mu_length("euclidean", [(0.0, 0.0), (0.6, 0.0)], [0.02, 0.01, 0.005])
    assert est["extrapolated"] == pytest.approx(0.6, rel=0.02)
    assert len(est["contents"]) == 3


def test_modulus_square_and_ring():
    m = mslab.modulus_quad("euclidean", [0.0, 0.0, 1.0, 1.0], h=1.0 / 32.0)
    assert m == pytest.approx(1.0, rel=0.02)
    ring = mslab.modulus_ring("euclidean", (0.0, 0.0), 1.0, math.e, h=math.e / 48.0)
    assert ring == pytest.approx(2.0 * math.pi, rel=0.05)


def test_checker_reports_are_json():
    rep = json.loads(mslab.check("euclidean", "imm"))
    assert rep["checker"] == "imm"
    assert rep["verdict"] == "pass"
    bad = pytest.raises(ValueError, mslab.check, "euclidean", "nosuch")
    assert "check name" in str(bad.value)


def test_unknown_space_raises():
    with pytest.raises(ValueError):
        mslab.dist("nosuch", (0.0, 0.0), (1.0, 0.0))
