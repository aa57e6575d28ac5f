"""Radial intensity of the interfering-drone point process.

At t=0 nearest-drone association carves an empty disc of radius u0 around
the serving drone's ground projection; every other drone then travels a
distance d = v*t in its own uniformly random direction. Independent
displacement of a Poisson process yields another Poisson process, so the
interferer field stays Poisson with a radial density that homogenizes as
the old exclusion disc smears out.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


def initial_density(u_x, u0, lambda0):
    """Interferer density right after association: lambda0 outside the
    exclusion disc, zero on and inside it (the boundary belongs to the
    empty side)."""
    u_x = np.asarray(u_x, dtype=float)
    out = np.where(u_x > u0, lambda0, 0.0)
    return float(out) if out.ndim == 0 else out


def kernel_pdf(u_y, u_x, d):
    """Density of the new ground distance after one random-direction hop.

    A point at radius u_x moves a distance d at an angle uniform on
    [0, 2*pi); by the cosine law the new radius u_y lies in
    [|u_x - d|, u_x + d] with density

        2*u_y / (pi * sqrt((u_y^2 - (u_x-d)^2) * ((u_x+d)^2 - u_y^2))).

    Returns 0 outside the support and +inf on its endpoints, where the
    density has integrable inverse-square-root singularities. Degenerate
    supports (u_x == 0 or d == 0) are point masses, flagged the same way.
    """
    if u_x < 0 or d < 0 or u_y < 0:
        raise ValueError("distances must be nonnegative")
    lo, hi = abs(u_x - d), u_x + d
    if u_y < lo or u_y > hi:
        return 0.0
    if u_y == lo or u_y == hi:
        return math.inf
    q = (u_y * u_y - lo * lo) * (hi * hi - u_y * u_y)
    return 2.0 * u_y / (math.pi * math.sqrt(q))


def kernel_integral(f, u_x, d):
    """Integrate f(u_y) against kernel_pdf(u_y; u_x, d) over the support.

    Both endpoint singularities vanish under u_y = m + w*sin(theta) with
    m, w the support midpoint and half-width: the quartic under the root
    factors as (u_y - lo)(hi - u_y)(u_y + lo)(u_y + hi) and the first two
    factors give w^2*cos^2(theta), cancelling the substitution Jacobian
    w*cos(theta) up to one smooth cosine. What remains is

        (2/pi) * f(u_y) * u_y / sqrt((u_y + lo)(u_y + hi))

    integrated over theta in [-pi/2, pi/2], which is smooth on the closed
    interval, so plain adaptive quadrature converges fast.
    """
    lo, hi = abs(u_x - d), u_x + d
    if hi == lo:
        return f(hi)
    m, w = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def g(theta):
        u_y = m + w * math.sin(theta)
        return 2.0 * f(u_y) * u_y / (math.pi * math.sqrt((u_y + lo) * (u_y + hi)))

    val, _ = integrate.quad(g, -math.pi / 2, math.pi / 2, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val


def kernel_normalization(u_x, d):
    """Total mass of the displacement kernel; equals 1 for any u_x, d > 0."""
    return kernel_integral(lambda _: 1.0, u_x, d)


def interferer_density(u_x, u0, t, v, lambda0):
    """Interferer density at ground distance u_x, a time t after association.

    Piecewise in u_x with d = v*t:
      outer, u_x >= u0 + d: unaffected by the old exclusion disc, lambda0.
      ring, |u0 - d| <= u_x <= u0 + d: a fraction arccos(arg)/pi of
        directions keeps a source point out of reach of radius u_x, with
        arg = (u0^2 - u_x^2 - d^2) / (2 u_x d) clamped to [-1, 1].
      inner, u_x <= |u0 - d|: still empty while the disc is intact
        (d < u0), fully refilled once every original outsider can have
        passed through (d > u0).

    The branches agree where they meet; u_x = 0 (possible on the ring only
    when u0 = d) takes the inner-branch value, a measure-zero convention.
    Accepts scalars or numpy arrays in u_x.
    """
    if u0 < 0 or t < 0 or v < 0 or lambda0 <= 0:
        raise ValueError("u0, t, v must be nonnegative and lambda0 positive")
    d = v * t
    if d == 0.0:
        return initial_density(u_x, u0, lambda0)
    u_x = np.asarray(u_x, dtype=float)
    if np.any(u_x < 0):
        raise ValueError("u_x must be nonnegative")
    lo, hi = abs(u0 - d), u0 + d
    inner_value = lambda0 if d > u0 else 0.0
    safe = np.where(u_x > 0, u_x, 1.0)
    # the ring expression is evaluated at every u_x and masked afterwards;
    # off-ring radii may overflow the division, which the clip absorbs
    with np.errstate(over="ignore", divide="ignore"):
        arg = np.clip((u0 * u0 - safe * safe - d * d) / (2.0 * safe * d), -1.0, 1.0)
        ring = lambda0 * np.arccos(arg) / math.pi
    out = np.where(u_x >= hi, lambda0, np.where(u_x <= lo, inner_value, ring))
    return float(out) if out.ndim == 0 else out


def density_from_kernel(u_y, u0, d, lambda0):
    """Displaced-field density computed the long way, for cross-checking.

    Pushes the annular source density lambda0*1(u_x > u0) through the hop
    kernel instead of using the closed form: in radial coordinates

        lambda(u_y) * 2*pi*u_y = int lambda0*1(u_x > u0) * 2*pi*u_x
                                     * kernel_pdf(u_y; u_x, d) du_x,

    where the support in u_x is [|u_y - d|, u_y + d]. The same sine
    substitution as kernel_integral (the quartic is symmetric in swapping
    u_x and u_y) regularizes both endpoints, and the source indicator only
    moves the lower integration limit.
    """
    if u_y < 0 or u0 < 0 or d <= 0 or lambda0 <= 0:
        raise ValueError("need u_y, u0 >= 0 and d, lambda0 > 0")
    if u_y == 0.0:
        return lambda0 if d > u0 else 0.0
    lo, hi = abs(u_y - d), u_y + d
    if u0 >= hi:
        return 0.0
    m, w = 0.5 * (lo + hi), 0.5 * (hi - lo)
    theta0 = -math.pi / 2
    if u0 > lo:
        theta0 = math.asin((u0 - m) / w)

    def g(theta):
        u_x = m + w * math.sin(theta)
        return 2.0 * lambda0 * u_x / (math.pi * math.sqrt((u_x + lo) * (u_x + hi)))

    val, _ = integrate.quad(g, theta0, math.pi / 2, epsabs=1e-14, epsrel=1e-10, limit=200)
    return val


def region_label(u_x, u0, t, v):
    d = v * t
    if u_x <= abs(u0 - d):
        return "inner"
    if u_x >= u0 + d:
        return "outer"
    return "ring"


@dataclass(frozen=True)
class DensityProfile:
    """interferer_density sampled on a grid, with region labels."""

    u0: float
    t: float
    v: float
    lambda0: float
    u_x: np.ndarray
    lam: np.ndarray
    region: tuple


def build_profile(u0, t, v, lambda0, u_max=None, step=1.0):
    """Sample the density on a uniform grid (default 1 m steps out to
    u0 + v*t + 2000 m, matching the scale on which the field re-levels)."""
    if u_max is None:
        u_max = u0 + v * t + 2000.0
    u_grid = np.arange(0.0, u_max + 0.5 * step, step, dtype=float)
    lam = interferer_density(u_grid, u0, t, v, lambda0)
    lam = np.asarray(lam, dtype=float)
    labels = tuple(region_label(u, u0, t, v) for u in u_grid)
    return DensityProfile(u0=u0, t=t, v=v, lambda0=lambda0, u_x=u_grid, lam=lam, region=labels)


def expected_annulus_count(u0, t, v, lambda0, r_lo, r_hi):
    """Mean number of interferers with ground distance in [r_lo, r_hi]:
    the density integrated against the annulus area element 2*pi*u du,
    split at the region boundaries so each quadrature panel is smooth."""
    if r_hi < r_lo:
        raise ValueError("need r_lo <= r_hi")
    d = v * t
    cuts = sorted({r_lo, r_hi, min(max(abs(u0 - d), r_lo), r_hi), min(max(u0 + d, r_lo), r_hi)})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        val, _ = integrate.quad(
            lambda u: 2.0 * math.pi * u * interferer_density(u, u0, t, v, lambda0),
            a, b, epsabs=1e-12, epsrel=1e-10, limit=200,
        )
        total += val
    return total


def write_profile_csv(profile, fh, echo_lines=()):
    """CSV export: hash-comment header lines, then u_x_m,lambda_per_m2,region
    rows at full double precision."""
    for line in echo_lines:
        fh.write(f"# {line}\n")
    fh.write("u_x_m,lambda_per_m2,region\n")
    for u, lam, region in zip(profile.u_x, profile.lam, profile.region):
        fh.write(f"{u:.17g},{lam:.17g},{region}\n")
