"""Release gate: eleven go/no-go criteria covering both engines, the
density law, the statistical invariants, and the qualitative ordering
claims. Each test prints a single PASS/FAIL line with the measured
statistic so the gate can be read off a plain pytest run. Parameters and
tolerances are passed explicitly so a drifting default cannot quietly
weaken the gate.
"""

import time

import pytest

from dronesim import validation
from dronesim.params import NetworkParams


@pytest.fixture(scope="module")
def params():
    # reference operating point: lambda0=1e-6 /m^2, h=100 m, alpha=3,
    # v=12.5 m/s, noise dimensioned for cell-edge SNR of 0 dB at p_edge=0.05
    return NetworkParams(lambda0=1e-6, h=100.0, v=12.5, alpha=3.0, p_edge=0.05)


def _gate(num, name, ok, summary):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {name}: {summary}"
    print(line)
    assert ok, line


def test_criterion_01_kernel_normalization():
    start = time.perf_counter()
    r = validation.check_kernel_normalization(seed=2024, n_pairs=100, tol=1e-6)
    elapsed = time.perf_counter() - start
    ok = r.passed and elapsed < 10.0
    _gate(1, "kernel_normalization",
          ok, f"max |mass-1|={r.statistic:.3e} over 100 pairs (tol 1e-6), {elapsed:.1f}s (cap 10s)")


def test_criterion_02_density_histogram_oracle():
    start = time.perf_counter()
    hist = validation.check_density_histogram(
        lambda0=1e-6, u0=500.0, v=12.5, ts=(20.0, 40.0, 50.0, 200.0),
        n_points=10_000_000, seed=7001, min_fraction=0.99)
    boundary = validation.check_boundary_continuity(lambda0=1e-6, v=12.5, tol=1e-12)
    elapsed = time.perf_counter() - start
    ok = hist.passed and boundary.passed and elapsed < 120.0
    _gate(2, "density_histogram_oracle",
          ok, f"worst in-3-sigma bin fraction={hist.statistic:.4f} (need >=0.99; {hist.detail}); "
              f"boundary mismatch={boundary.statistic:.1e} (tol 1e-12); {elapsed:.1f}s (cap 120s)")


def test_criterion_03_displaced_ppp_remains_poisson():
    r = validation.check_displacement_invariance(lambda0=1e-6, v=12.5, t=50.0,
                                                 seed=2104, p_min=0.01)
    _gate(3, "displaced_ppp_remains_poisson",
          r.passed, f"chi-square p={r.statistic:.3f} across 20 regions (need >0.01)")


def test_criterion_04_cross_engine_coverage(params):
    start = time.perf_counter()
    r = validation.check_cross_engine_coverage(
        params, gammas_db=(-5.0, 0.0, 5.0), ts=(0.0, 20.0, 50.0, 200.0),
        n_trials=100_000, seed=4201, floor=1e-3)
    elapsed = time.perf_counter() - start
    ok = r.passed and elapsed < 600.0
    _gate(4, "cross_engine_coverage",
          ok, f"worst |analytic-MC|/max(2ci,1e-3)={r.statistic:.3f} (need <=1) "
              f"over 3 thresholds x 4 times, 1e5 trials, {elapsed:.1f}s (cap 600s)")
    if not r.passed:
        print(r.detail)


def test_criterion_05_t0_collapse(params):
    r = validation.check_t0_collapse(params, n_gammas=20, tol=1e-8)
    _gate(5, "t0_collapse",
          r.passed, f"max |model2(g,0)-model1(g)|={r.statistic:.2e} on 20-point grid (tol 1e-8)")


def test_criterion_06_model_dominance(params):
    r = validation.check_model_dominance(params, gammas_db=(-5.0, 0.0, 5.0),
                                         ts=(20.0, 40.0, 50.0, 200.0))
    _gate(6, "model_dominance",
          r.passed, f"worst model1-model2 gap={r.statistic:.2e} over t>0 grid (must be <=1e-8)")


def test_criterion_07_rate_orderings():
    alpha = validation.check_alpha_rate_ordering(lambda0=1e-6, h=100.0, v=12.5,
                                                 ts=(0.0, 100.0), alphas=(2.5, 3.5))
    height = validation.check_height_rate_ordering(lambda0=1e-6, alpha=3.0, v=12.5,
                                                   ts=(0.0, 100.0), heights=(100.0, 200.0))
    ok = alpha.passed and height.passed
    _gate(7, "rate_orderings",
          ok, f"rate(a=3.5)-rate(a=2.5) margin={alpha.statistic:.4f}, "
              f"rate(h=100)-rate(h=200) margin={height.statistic:.4f} "
              f"at t in {{0,100}} (need >1e-6); {alpha.detail}; {height.detail}")


def test_criterion_08_interference_limited(params):
    r = validation.check_noise_sensitivity(params, gammas_db=(-5.0, 0.0, 5.0),
                                           ts=(20.0, 40.0, 50.0, 200.0), tol=0.05)
    _gate(8, "interference_limited",
          r.passed, f"max relative coverage shift without noise={r.statistic:.4f} "
                    f"(need <0.05); {r.detail}")


def test_criterion_09_mobility_rate_bound(params):
    r = validation.check_mobility_rate_bound(params, ts=(25.0, 50.0, 100.0),
                                             n_trials=100_000, seed=5601)
    _gate(9, "mobility_rate_bound",
          r.passed, f"worst straight-(rw|rwp)-2ci deficit={r.statistic:.4f} nats "
                    f"(must be <=0) at t in {{25,50,100}}, 1e5 trials")
    if not r.passed:
        print(r.detail)


def test_criterion_10_noise_dimensioning():
    r = validation.check_noise_dimensioning(lambda0=1e-6, h=100.0, alpha=3.0,
                                            p_edge=0.05, tol=1e-9)
    _gate(10, "noise_dimensioning",
          r.passed, f"cell-edge SNR deviation from 0 dB={r.statistic:.2e} relative (tol 1e-9)")


def test_criterion_11_rate_path_regression():
    r = validation.check_rate_integration_regression(tol=1e-5)
    _gate(11, "rate_path_regression",
          r.passed, f"stubbed-coverage rate error={r.statistic:.2e} vs 0.596347 (tol 1e-5)")
