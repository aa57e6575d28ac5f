import math

import pytest

from dronesim.params import (
    MobilityKind,
    NetworkParams,
    ServiceModel,
    cell_edge_distance,
    db_to_linear,
    link_distance,
    linear_to_db,
    noise_power,
    serving_ground_distance_model2,
)


def test_db_round_trip():
    for x in (-20.0, -5.0, 0.0, 3.0, 5.0, 17.5):
        assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_db_reference_points():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-10.0) == pytest.approx(0.1)


def test_link_distance():
    assert link_distance(300.0, 400.0) == pytest.approx(500.0)
    assert link_distance(0.0, 100.0) == 100.0


def test_serving_ground_distance_model2_clamps_at_zero():
    assert serving_ground_distance_model2(500.0, 12.5, 20.0) == pytest.approx(250.0)
    assert serving_ground_distance_model2(500.0, 12.5, 40.0) == 0.0
    assert serving_ground_distance_model2(500.0, 12.5, 200.0) == 0.0


def test_cell_edge_distance_quantile():
    # the nearest-drone law evaluated at the edge distance leaves exactly
    # p_edge mass beyond it
    lambda0, h, p_edge = 1e-6, 100.0, 0.05
    d = cell_edge_distance(lambda0, h, p_edge)
    u_sq = d * d - h * h
    assert math.exp(-math.pi * lambda0 * u_sq) == pytest.approx(p_edge, rel=1e-12)


def test_noise_power_dimensioning():
    lambda0, h, alpha = 1e-6, 100.0, 3.0
    n0 = noise_power(lambda0, h, alpha, 0.05)
    assert n0 == pytest.approx(1.057241699614499e-09, rel=1e-12)
    d = cell_edge_distance(lambda0, h, 0.05)
    assert d ** (-alpha) / n0 == pytest.approx(1.0, rel=1e-12)


def test_noise_power_height_dependence():
    n100 = noise_power(1e-6, 100.0, 3.0, 0.05)
    n200 = noise_power(1e-6, 200.0, 3.0, 0.05)
    assert n200 == pytest.approx(1.0097212796805334e-09, rel=1e-12)
    assert n200 < n100


def test_params_defaults_fill_noise():
    p = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0)
    assert p.p == 1.0
    assert p.n0 == pytest.approx(1.057241699614499e-09, rel=1e-12)


def test_params_explicit_noise_kept():
    p = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, n0=2e-9)
    assert p.n0 == 2e-9


def test_without_noise():
    p = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0)
    q = p.without_noise()
    assert q.n0 == 0.0
    assert q.lambda0 == p.lambda0 and q.h == p.h and q.alpha == p.alpha


def test_params_frozen():
    p = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0)
    with pytest.raises(Exception):
        p.h = 50.0


@pytest.mark.parametrize("kwargs", [
    dict(lambda0=0.0, h=100.0, v=12.5, alpha=3.0),
    dict(lambda0=-1e-6, h=100.0, v=12.5, alpha=3.0),
    dict(lambda0=1e-6, h=0.0, v=12.5, alpha=3.0),
    dict(lambda0=1e-6, h=100.0, v=-1.0, alpha=3.0),
    dict(lambda0=1e-6, h=100.0, v=12.5, alpha=2.0),
    dict(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, p=0.0),
    dict(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, n0=-1e-9),
    dict(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, p_edge=0.0),
    dict(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, p_edge=1.0),
])
def test_params_validation_rejects(kwargs):
    with pytest.raises(ValueError):
        NetworkParams(**kwargs)


def test_enums():
    assert ServiceModel.UE_INDEPENDENT.value == 1
    assert ServiceModel.UE_DEPENDENT.value == 2
    assert MobilityKind.STRAIGHT.value == "straight-line"
    assert MobilityKind.RANDOM_WALK.value == "random-walk"
    assert MobilityKind.RANDOM_WAYPOINT.value == "random-waypoint"
