"""Deterministic evaluation of coverage probability and rate.

Coverage conditions on the initial serving distance u0 (Rayleigh-weighted
by the nearest-neighbor law), multiplies the noise factor by the Laplace
transform of the interference seen at time t, and integrates u0 out. The
interference exponent integrates the fading-averaged received power against
the time-varying interferer density, which is piecewise smooth with breaks
at ground distances |u0 - v*t| and u0 + v*t; every quadrature panel is cut
there so the integrands stay smooth.

The semi-infinite part of the exponent reduces to the Gauss hypergeometric
function (substituting y = ((u^2+h^2)/r0^2)^{alpha/2}/gamma turns it into
the tail of 1/(1+y^p)), so only the finite ring segments and the outer u0
integral need adaptive Gauss-Kronrod quadrature. That matters at large
thresholds, where the integrand plateau grows like gamma^{2/alpha} and
semi-infinite quadrature becomes roundoff-limited. The outer u0 integral is
truncated where the Rayleigh weight exp(-pi*lambda0*u0^2) has tail mass
below 1e-12.
"""

import math
import warnings
from dataclasses import dataclass

from scipy import integrate, special

from .params import NetworkParams, ServiceModel

OUTER_TAIL_MASS = 1e-12
INNER_EPSABS = 1e-12
INNER_EPSREL = 1e-10
OUTER_EPSABS = 1e-10
OUTER_EPSREL = 1e-9
RATE_TAIL_BOUND = 1e-8
RATE_GAMMA_CAP = 1e12
ERROR_CAP = 1e-6


class QuadratureError(RuntimeError):
    """Quadrature failed to reach a usable error estimate."""

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: str
    half_width: float
    quadrature_error_estimate: float


@dataclass(frozen=True)
class RateResult:
    value: float
    method: str
    half_width: float
    quadrature_error_estimate: float


def _quad(f, a, b, epsabs, epsrel):
    """quad with convergence warnings demoted to the returned error bound.

    The tight tolerances used here routinely trip QUADPACK's roundoff
    warning while the returned estimate is already far below our caps, so
    the estimate (not the warning) is the signal that matters.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)
    return val, err


def _clamp(x):
    return min(1.0, max(-1.0, x))


def _tail_fraction(y0, p):
    """Integral of 1/(1 + y^p) over [y0, inf) for p > 1.

    Both branches keep the hypergeometric argument inside [-1, 0], where
    the evaluation is correctly rounded; y0^p itself is never formed for
    small y0, so nothing overflows.
    """
    full = math.pi / (p * math.sin(math.pi / p))
    if y0 == 0.0:
        return full
    if y0 <= 1.0:
        head = y0 * special.hyp2f1(1.0, 1.0 / p, 1.0 + 1.0 / p, -(y0 ** p))
        return full - head
    return y0 ** (1.0 - p) / (p - 1.0) * special.hyp2f1(
        1.0, 1.0 - 1.0 / p, 2.0 - 1.0 / p, -(y0 ** -p))


def _plane_integral(a, r0sq, gamma, alpha, h2):
    """Fading-averaged interference exponent kernel integrated over the
    whole plane beyond ground distance a: the exact value of
    int_a^inf u / (1 + ((u^2+h^2)/r0sq)^{alpha/2} / gamma) du."""
    scale = r0sq * gamma ** (2.0 / alpha)
    y0 = (a * a + h2) / scale
    return 0.5 * scale * _tail_fraction(y0, 0.5 * alpha)


def outer_truncation_radius(lambda0):
    """Ground distance beyond which the nearest-drone law leaves less than
    OUTER_TAIL_MASS probability."""
    return math.sqrt(-math.log(OUTER_TAIL_MASS) / (math.pi * lambda0))


def coverage_model2(gamma, t, params):
    """Coverage probability at threshold gamma, a time t after association,
    when the serving drone flies to the user's zenith and hovers.

    Two outer regimes: serving drone already overhead (initial distance
    u0 <= v*t, 3D link length exactly h) and still inbound (u0 > v*t, link
    length sqrt((u0-v*t)^2 + h^2)). In both, the interference exponent is
    the full-plane integral of the fading kernel minus the part removed by
    the not-yet-refilled exclusion region; the removed part lives on the
    ring [|u0 - v*t|, u0 + v*t] weighted by the reachable-angle fraction.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    lam, h, alpha, p, n0 = params.lambda0, params.h, params.alpha, params.p, params.n0
    vt = params.v * t
    u0_max = outer_truncation_radius(lam)
    h2 = h * h
    inner_errs = [0.0]

    def g(u, r0sq):
        return u / (1.0 + ((u * u + h2) / r0sq) ** (0.5 * alpha) / gamma)

    overhead_exponent_fixed = gamma * h ** alpha * n0 / p
    if vt > 0.0:
        g_total = _plane_integral(0.0, h2, gamma, alpha, h2)

    def integrand_overhead(u0):
        removed, err = _quad(
            lambda u: g(u, h2) * math.acos(_clamp((u * u + vt * vt - u0 * u0) / (2.0 * u * vt))) / math.pi,
            vt - u0, vt + u0, INNER_EPSABS, INNER_EPSREL,
        )
        inner_errs.append(err)
        expo = -math.pi * lam * u0 * u0 - overhead_exponent_fixed - 2.0 * math.pi * lam * (g_total - removed)
        return 2.0 * math.pi * lam * u0 * math.exp(expo)

    def integrand_inbound(u0):
        r0sq = (u0 - vt) * (u0 - vt) + h2
        outside = _plane_integral(u0 + vt, r0sq, gamma, alpha, h2)
        ring = 0.0
        if vt > 0.0:
            ring, err_r = _quad(
                lambda u: g(u, r0sq) * math.acos(_clamp((u0 * u0 - u * u - vt * vt) / (2.0 * u * vt))) / math.pi,
                u0 - vt, u0 + vt, INNER_EPSABS, INNER_EPSREL,
            )
            inner_errs.append(err_r)
        expo = (-math.pi * lam * u0 * u0 - gamma * r0sq ** (0.5 * alpha) * n0 / p
                - 2.0 * math.pi * lam * (outside + ring))
        return 2.0 * math.pi * lam * u0 * math.exp(expo)

    total, outer_err = 0.0, 0.0
    if vt > 0.0:
        val, err = _quad(integrand_overhead, 0.0, min(vt, u0_max), OUTER_EPSABS, OUTER_EPSREL)
        total += val
        outer_err += err
    if vt < u0_max:
        val, err = _quad(integrand_inbound, vt, u0_max, OUTER_EPSABS, OUTER_EPSREL)
        total += val
        outer_err += err

    # inner-integral error enters through the exponent; with value <= 1 its
    # effect on the result is bounded by 2*pi*lambda0 * err
    err_est = outer_err + OUTER_TAIL_MASS + 2.0 * math.pi * lam * max(inner_errs)
    if err_est > ERROR_CAP:
        raise QuadratureError("coverage quadrature did not converge", err_est)
    return CoverageResult(value=min(max(total, 0.0), 1.0), method="analytic",
                          half_width=0.0, quadrature_error_estimate=err_est)


def coverage_model1(gamma, params):
    """Coverage probability when the serving drone wanders off in its own
    random direction and the user hands over to whichever drone is nearest.

    Re-resolving the nearest drone at time t restores the t=0 picture (the
    displaced field is again Poisson with the same density), so the value
    is time-invariant: Rayleigh-weighted noise factor times the interference
    Laplace transform with all interferers beyond the serving distance.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    lam, h, alpha, p, n0 = params.lambda0, params.h, params.alpha, params.p, params.n0
    u0_max = outer_truncation_radius(lam)
    h2 = h * h

    def integrand(u0):
        r0sq = u0 * u0 + h2
        outside = _plane_integral(u0, r0sq, gamma, alpha, h2)
        expo = (-math.pi * lam * u0 * u0 - gamma * r0sq ** (0.5 * alpha) * n0 / p
                - 2.0 * math.pi * lam * outside)
        return 2.0 * math.pi * lam * u0 * math.exp(expo)

    total, outer_err = _quad(integrand, 0.0, u0_max, OUTER_EPSABS, OUTER_EPSREL)
    err_est = outer_err + OUTER_TAIL_MASS
    if err_est > ERROR_CAP:
        raise QuadratureError("coverage quadrature did not converge", err_est)
    return CoverageResult(value=min(max(total, 0.0), 1.0), method="analytic",
                          half_width=0.0, quadrature_error_estimate=err_est)


def coverage(gamma, t, model, params):
    if model is ServiceModel.UE_DEPENDENT:
        return coverage_model2(gamma, t, params)
    return coverage_model1(gamma, params)


def rate_from_coverage(pc, gamma_max=None):
    """Mean of ln(1 + SINR) given the coverage function pc(gamma).

    Uses R = int_0^inf pc(gamma)/(1+gamma) dgamma, substituted with
    s = ln(1+gamma) so the integrand is pc(e^s - 1) on a finite interval.
    When gamma_max is not given the upper limit doubles until the next
    octave's contribution bound pc(G)*ln((1+2G)/(1+G)) drops below
    RATE_TAIL_BOUND.
    """
    if gamma_max is None:
        gamma_max = 1.0
        while gamma_max < RATE_GAMMA_CAP:
            bound = pc(gamma_max) * math.log((1.0 + 2.0 * gamma_max) / (1.0 + gamma_max))
            if bound < RATE_TAIL_BOUND:
                break
            gamma_max *= 2.0
    s_max = math.log1p(gamma_max)
    val, err = _quad(lambda s: pc(math.expm1(s)), 0.0, s_max, 1e-10, 1e-8)
    return max(val, 0.0), err


def rate(t, model, params, gamma_max=None):
    """Rate in nats per channel use at time t for the given service model."""
    if model is ServiceModel.UE_DEPENDENT:
        pc = lambda gamma: coverage_model2(gamma, t, params).value
    else:
        pc = lambda gamma: coverage_model1(gamma, params).value
    value, err = rate_from_coverage(pc, gamma_max=gamma_max)
    return RateResult(value=value, method="analytic", half_width=0.0,
                      quadrature_error_estimate=err + RATE_TAIL_BOUND)
