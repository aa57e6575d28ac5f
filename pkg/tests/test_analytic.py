import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from dronesim import analytic
from dronesim.analytic import (
    QuadratureError,
    _plane_integral,
    _tail_fraction,
    coverage,
    coverage_model1,
    coverage_model2,
    outer_truncation_radius,
    rate,
    rate_from_coverage,
)
from dronesim.params import NetworkParams, ServiceModel

PARAMS = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0)


def test_coverage_reference_values():
    assert coverage_model2(1.0, 0.0, PARAMS).value == pytest.approx(0.334832745306281, rel=1e-10)
    assert coverage_model2(1.0, 20.0, PARAMS).value == pytest.approx(0.6737777202271962, rel=1e-10)
    assert coverage_model2(1.0, 200.0, PARAMS).value == pytest.approx(0.9479154211736478, rel=1e-10)
    assert coverage_model1(1.0, PARAMS).value == pytest.approx(0.334832745306281, rel=1e-10)


def test_result_metadata():
    res = coverage_model2(1.0, 20.0, PARAMS)
    assert res.method == "analytic"
    assert res.half_width == 0.0
    assert 0.0 < res.quadrature_error_estimate < analytic.ERROR_CAP


def test_t0_collapse_is_exact():
    for gamma in np.logspace(-1.0, 1.0, 7):
        a = coverage_model1(float(gamma), PARAMS).value
        b = coverage_model2(float(gamma), 0.0, PARAMS).value
        assert a == b


def test_dispatcher_routes_models():
    g = 2.0
    assert coverage(g, 30.0, ServiceModel.UE_DEPENDENT, PARAMS).value == \
        coverage_model2(g, 30.0, PARAMS).value
    assert coverage(g, 30.0, ServiceModel.UE_INDEPENDENT, PARAMS).value == \
        coverage_model1(g, PARAMS).value


def test_invalid_arguments_rejected():
    with pytest.raises(ValueError):
        coverage_model2(0.0, 10.0, PARAMS)
    with pytest.raises(ValueError):
        coverage_model2(-1.0, 10.0, PARAMS)
    with pytest.raises(ValueError):
        coverage_model2(1.0, -1.0, PARAMS)
    with pytest.raises(ValueError):
        coverage_model1(0.0, PARAMS)


def test_coverage_decreases_with_threshold():
    values = [coverage_model2(g, 50.0, PARAMS).value
              for g in (0.1, 0.316, 1.0, 3.16, 10.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_coverage_improves_while_serving_drone_closes_in():
    # monotone while a meaningful fraction of serving drones is still
    # inbound; past that the old exclusion ring drifts out of interference
    # range and coverage relaxes slightly (see the saturation test)
    values = [coverage_model2(1.0, t, PARAMS).value for t in (0.0, 10.0, 20.0, 40.0, 100.0)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)


def test_noise_only_hurts():
    quiet = PARAMS.without_noise()
    for t in (0.0, 50.0):
        for g in (0.316, 1.0, 3.16):
            assert coverage_model2(g, t, quiet).value >= coverage_model2(g, t, PARAMS).value


def test_overhead_regime_relaxes_toward_homogenized_limit():
    # with every serving drone overhead, more time only carries the old
    # exclusion deficit farther out, so the interference creeps up and
    # coverage decays toward the fully homogenized field, never crossing
    # the zero-interference noise bound
    peak = coverage_model2(1.0, 100.0, PARAMS).value
    late = coverage_model2(1.0, 1000.0, PARAMS).value
    very_late = coverage_model2(1.0, 5000.0, PARAMS).value
    bound = math.exp(-PARAMS.n0 * PARAMS.h ** PARAMS.alpha / PARAMS.p)
    assert very_late < late < peak < bound
    assert peak - very_late < 1e-3


def test_outer_truncation_radius_tail_mass():
    r = outer_truncation_radius(1e-6)
    assert math.exp(-math.pi * 1e-6 * r * r) == pytest.approx(1e-12, rel=1e-9)


def test_tail_fraction_reference():
    # integral over the whole half-line
    for p in (1.25, 1.5, 2.0, 3.0):
        assert _tail_fraction(0.0, p) == pytest.approx(math.pi / (p * math.sin(math.pi / p)),
                                                       rel=1e-14)
    # continuity across the hypergeometric branch switch at y0 = 1
    for p in (1.1, 1.75, 2.5):
        below = _tail_fraction(1.0 - 1e-12, p)
        above = _tail_fraction(1.0 + 1e-12, p)
        assert below == pytest.approx(above, rel=1e-10)


@settings(deadline=None, max_examples=50)
@given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=1.05, max_value=3.0))
def test_tail_fraction_matches_quadrature(log_y0, p):
    y0 = 10.0 ** log_y0
    ref, _ = integrate.quad(lambda y: 1.0 / (1.0 + y ** p), y0, np.inf,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    assert _tail_fraction(y0, p) == pytest.approx(ref, rel=1e-9)


@settings(deadline=None, max_examples=40)
@given(
    st.floats(min_value=0.0, max_value=3000.0),
    st.floats(min_value=1e4, max_value=1e7),
    st.floats(min_value=-2.0, max_value=6.0),
    st.floats(min_value=2.2, max_value=4.0),
)
def test_plane_integral_matches_quadrature(a, r0sq, log_gamma, alpha):
    gamma = 10.0 ** log_gamma
    h2 = 1e4
    got = _plane_integral(a, r0sq, gamma, alpha, h2)
    f = lambda u: u / (1.0 + ((u * u + h2) / r0sq) ** (0.5 * alpha) / gamma)
    knee = math.sqrt(max(r0sq * gamma ** (2.0 / alpha) - h2, 0.0))
    mid = max(a, knee) * 10.0 + 10.0
    v1, _ = integrate.quad(f, a, mid, epsabs=1e-15, epsrel=1e-12, limit=600)
    hi = mid * 1e4
    v2, _ = integrate.quad(f, mid, hi, epsabs=1e-15, epsrel=1e-12, limit=600)
    tail = gamma * r0sq ** (0.5 * alpha) * hi ** (2.0 - alpha) / (alpha - 2.0)
    assert got == pytest.approx(v1 + v2 + tail, rel=1e-6)


def test_rate_stub_exponential_integral():
    value, err = rate_from_coverage(lambda g: math.exp(-g))
    assert value == pytest.approx(float(math.e * special.exp1(1.0)), abs=1e-8)
    assert err < 1e-8


def test_rate_reference_values():
    r2 = rate(50.0, ServiceModel.UE_DEPENDENT, PARAMS)
    assert r2.value == pytest.approx(3.016773029756837, rel=1e-9)
    r1 = rate(0.0, ServiceModel.UE_INDEPENDENT, PARAMS)
    assert r1.value == pytest.approx(0.7102457217417547, rel=1e-9)
    assert r2.method == "analytic"


def test_rate_model1_time_invariant():
    assert rate(0.0, ServiceModel.UE_INDEPENDENT, PARAMS).value == \
        rate(77.0, ServiceModel.UE_INDEPENDENT, PARAMS).value


def test_rate_increases_with_time_model2():
    values = [rate(t, ServiceModel.UE_DEPENDENT, PARAMS).value for t in (0.0, 25.0, 100.0)]
    assert values[0] < values[1] < values[2]


def test_rate_explicit_gamma_max_matches_doubling():
    auto = rate_from_coverage(lambda g: math.exp(-g))[0]
    fixed = rate_from_coverage(lambda g: math.exp(-g), gamma_max=80.0)[0]
    assert fixed == pytest.approx(auto, abs=1e-9)


def test_rate_survives_heavy_tail_thresholds():
    # steep path loss pushes the doubling rule to very large thresholds;
    # this used to break semi-infinite quadrature
    p = NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.5)
    r = rate(0.0, ServiceModel.UE_DEPENDENT, p)
    assert 0.9 < r.value < 1.1


def test_quadrature_error_carries_estimate():
    err = QuadratureError("test", 0.125)
    assert err.error_estimate == 0.125
    assert "1.250e-01" in str(err)
