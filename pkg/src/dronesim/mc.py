"""Monte Carlo engine: samples drone deployments, moves them, and estimates
coverage and rate empirically.

Truncation scheme. Interference is summed over drones whose displaced ground
distance falls within an evaluation radius R_eval; the field beyond R_eval is
replaced by its exact mean. The displaced interferer density equals lambda0
everywhere beyond u0 + v*t, and R_eval is far larger than any plausible
u0 + v*t, so the far-field mean 2*pi*lambda0*P*(R_eval^2+h^2)^(1-alpha/2)
/(alpha-2) is exact for every mobility kind; only the far field's
fluctuation around that mean is dropped. Sources are drawn out to
R_sim = R_eval + v*t_max, which covers every drone able to reach R_eval,
because no mobility kind here moves a drone farther than v*t.

Reproducibility. Trial i of a run with master seed s draws everything from
a generator seeded with the entropy pair (s, i), so results are bit-identical
however trials are batched or distributed, and any single trial can be
replayed in isolation.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .params import MobilityKind, ServiceModel

EVAL_RADIUS_SCALE = 14.0


@dataclass(frozen=True)
class MobilitySpec:
    kind: MobilityKind
    v: float
    rw_epoch: float = 10.0
    rwp_waypoint_radius: float = 500.0
    pause: float = 0.0

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("v must be nonnegative")
        if self.rw_epoch <= 0:
            raise ValueError("rw_epoch must be positive")
        if self.rwp_waypoint_radius <= 0:
            raise ValueError("rwp_waypoint_radius must be positive")
        if self.pause < 0:
            raise ValueError("pause must be nonnegative")


@dataclass(frozen=True)
class EmpiricalEstimate:
    mean: float
    half_width_95: float
    n_trials: int


def _estimate_from_sums(total, total_sq, n):
    mean = float(total) / n
    if n > 1:
        var = max(float(total_sq) - n * mean * mean, 0.0) / (n - 1)
    else:
        var = 0.0
    return EmpiricalEstimate(mean=mean, half_width_95=1.96 * math.sqrt(var / n), n_trials=n)


def default_eval_radius(lambda0):
    """Interference evaluation radius, EVAL_RADIUS_SCALE nearest-drone scales
    out. Far enough that the exclusion ring never reaches it and the dropped
    far-field fluctuation shifts coverage by well under 1e-3."""
    return EVAL_RADIUS_SCALE / math.sqrt(math.pi * lambda0)


def far_field_mean_interference(params, r_eval):
    """Mean interference (fading averaged, in units of P) from the homogeneous
    lambda0 field beyond ground distance r_eval."""
    a = params.alpha
    return (2.0 * math.pi * params.lambda0
            * (r_eval * r_eval + params.h * params.h) ** (1.0 - 0.5 * a) / (a - 2.0))


def _unit_vectors(angles):
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def _uniform_disc(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    return r[:, None] * _unit_vectors(2.0 * math.pi * rng.random(n))


class TrajectorySet:
    """One frozen realization of n drones' paths, evaluable at any absolute
    time in [0, t_max].

    Straight-line: one angle per drone for all time. Random walk: a fresh
    angle every rw_epoch seconds (epoch boundaries shared by all drones).
    Random waypoint: each drone repeatedly picks a waypoint uniformly in a
    disc of radius rwp_waypoint_radius about its current position, flies
    there at speed v, sits out the pause, picks again. Waypoint legs are
    drawn one column at a time so a realization extended to a larger t_max
    agrees with the shorter one over their common horizon.
    """

    def __init__(self, rng, n, mobility, t_max):
        self.n = n
        self.v = mobility.v
        self.kind = mobility.kind
        if n == 0:
            return
        if self.kind is MobilityKind.STRAIGHT or self.v == 0.0:
            self.units = _unit_vectors(2.0 * math.pi * rng.random(n))
            return
        if self.kind is MobilityKind.RANDOM_WALK:
            self.epoch = mobility.rw_epoch
            n_epochs = max(1, math.ceil(t_max / self.epoch - 1e-12))
            cols = [_unit_vectors(2.0 * math.pi * rng.random(n)) for _ in range(n_epochs)]
            self.units = np.stack(cols, axis=1)                    # (n, K, 2)
            self.prefix = np.cumsum(self.units, axis=1)
            return
        # random waypoint: per-leg relative offsets, travel times, dwell times
        offsets, travels = [], []
        covered = np.zeros(n)
        while len(offsets) == 0 or covered.min() <= t_max:
            off = _uniform_disc(rng, n, mobility.rwp_waypoint_radius)
            travel = np.hypot(off[:, 0], off[:, 1]) / self.v
            offsets.append(off)
            travels.append(travel)
            covered = covered + travel + mobility.pause
        self.offsets = np.stack(offsets, axis=1)                   # (n, K, 2)
        self.travel = np.stack(travels, axis=1)                    # (n, K)
        self.cum_dur = np.cumsum(self.travel + mobility.pause, axis=1)
        self.cum_off = np.cumsum(self.offsets, axis=1)

    def positions(self, origins, t):
        """Positions at absolute time t of drones that started at origins."""
        if self.n == 0:
            return origins.copy()
        if t == 0.0:
            return origins.copy()
        if self.kind is MobilityKind.STRAIGHT or self.v == 0.0:
            return origins + self.v * t * self.units
        if self.kind is MobilityKind.RANDOM_WALK:
            n_full = min(int(t / self.epoch), self.units.shape[1] - 1)
            rem = t - n_full * self.epoch
            disp = rem * self.units[:, n_full, :]
            if n_full > 0:
                disp = disp + self.epoch * self.prefix[:, n_full - 1, :]
            return origins + self.v * disp
        # random waypoint: completed legs plus a partial move along the next
        idx = (self.cum_dur <= t).sum(axis=1)
        idx = np.minimum(idx, self.cum_dur.shape[1] - 1)
        prev_end = np.where(idx > 0, np.take_along_axis(self.cum_dur, np.maximum(idx - 1, 0)[:, None], axis=1)[:, 0], 0.0)
        done = np.where(idx[:, None] > 0, np.take_along_axis(self.cum_off, np.maximum(idx - 1, 0)[:, None, None], axis=1)[:, 0, :], 0.0)
        travel = np.take_along_axis(self.travel, idx[:, None], axis=1)[:, 0]
        leg = np.take_along_axis(self.offsets, idx[:, None, None], axis=1)[:, 0, :]
        tau = np.clip(t - prev_end, 0.0, travel)
        frac = np.divide(tau, travel, out=np.zeros_like(tau), where=travel > 0)
        return origins + done + frac[:, None] * leg


@dataclass
class Snapshot:
    """Drone ground projections at one instant, serving drone singled out.

    rng_seed records the entropy that produced the deployment; trajectory
    realizations derive from trajectory_seed so that advancing a snapshot by
    dt twice lands exactly where one advance by 2*dt does, for every
    mobility kind.
    """

    time: float
    serving: np.ndarray
    interferers: np.ndarray
    u0: float
    rng_seed: tuple
    trajectory_seed: int
    serving_angle: float
    retries: int = 0
    origin_serving: Optional[np.ndarray] = None
    origin_interferers: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.origin_serving is None:
            self.origin_serving = self.serving.copy()
        if self.origin_interferers is None:
            self.origin_interferers = self.interferers.copy()


def sample_deployment(params, seed, r_sim=None):
    """Draw a fresh t=0 deployment: Poisson count on the simulation disc,
    uniform positions, nearest drone to the origin becomes the serving one.
    An empty Poisson draw is resampled and counted in retries."""
    if r_sim is None:
        r_sim = default_eval_radius(params.lambda0)
    entropy = seed if isinstance(seed, tuple) else (seed,)
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    mean_count = params.lambda0 * math.pi * r_sim * r_sim
    retries = 0
    count = int(rng.poisson(mean_count))
    while count == 0:
        retries += 1
        count = int(rng.poisson(mean_count))
    points = _uniform_disc(rng, count, r_sim)
    dist_sq = points[:, 0] ** 2 + points[:, 1] ** 2
    nearest = int(np.argmin(dist_sq))
    serving = points[nearest].copy()
    interferers = np.delete(points, nearest, axis=0)
    trajectory_seed = int(rng.integers(0, 2 ** 63))
    serving_angle = 2.0 * math.pi * float(rng.random())
    return Snapshot(time=0.0, serving=serving, interferers=interferers,
                    u0=float(math.sqrt(dist_sq[nearest])), rng_seed=entropy,
                    trajectory_seed=trajectory_seed, serving_angle=serving_angle,
                    retries=retries)


def advance(snapshot, mobility, model, dt, rng=None):
    """Snapshot at time + dt. Interferers follow the mobility realization
    seeded by the snapshot (composable: two advances of dt match one of
    2*dt); the serving drone flies radially inward with a clamp at the
    origin under the UE-dependent model, or on its own straight line under
    the UE-independent model. rng is accepted for signature compatibility
    and ignored; all randomness is derived from the snapshot's seeds."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    t_new = snapshot.time + dt
    traj = TrajectorySet(np.random.default_rng(np.random.SeedSequence((snapshot.trajectory_seed,))),
                         snapshot.origin_interferers.shape[0], mobility, t_new)
    interferers = traj.positions(snapshot.origin_interferers, t_new)
    if model is ServiceModel.UE_DEPENDENT:
        u0_t = max(snapshot.u0 - mobility.v * t_new, 0.0)
        scale = u0_t / snapshot.u0 if snapshot.u0 > 0 else 0.0
        serving = snapshot.origin_serving * scale
    else:
        direction = np.array([math.cos(snapshot.serving_angle), math.sin(snapshot.serving_angle)])
        serving = snapshot.origin_serving + mobility.v * t_new * direction
    return Snapshot(time=t_new, serving=serving, interferers=interferers,
                    u0=snapshot.u0, rng_seed=snapshot.rng_seed,
                    trajectory_seed=snapshot.trajectory_seed,
                    serving_angle=snapshot.serving_angle, retries=snapshot.retries,
                    origin_serving=snapshot.origin_serving,
                    origin_interferers=snapshot.origin_interferers)


def simulate_grid(params, model, mobility, ts, gammas, n_trials, seed,
                  r_eval=None, record=None):
    """Empirical coverage on the (t, gamma) grid and rate at each t.

    One deployment and one trajectory realization serve all requested times
    of a trial; fading is redrawn independently at each evaluated time.
    Returns (coverage, rates): coverage[i][j] is the EmpiricalEstimate at
    (ts[i], gammas[j]) and rates[i] the rate estimate at ts[i]. When record
    is a list, it collects (trial, t, sinr) rows for export.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    seed = int(seed)
    ts = [float(t) for t in ts]
    gammas = np.asarray(list(gammas), dtype=float)
    if any(t < 0 for t in ts) or np.any(gammas <= 0):
        raise ValueError("need t >= 0 and gamma > 0")
    if r_eval is None:
        r_eval = default_eval_radius(params.lambda0)
    t_max = max(ts)
    r_sim = r_eval + mobility.v * t_max
    h2 = params.h * params.h
    half_alpha = 0.5 * params.alpha
    noise_over_p = params.n0 / params.p
    far_mean = far_field_mean_interference(params, r_eval)
    r_eval_sq = r_eval * r_eval

    cov_counts = np.zeros((len(ts), gammas.size), dtype=np.int64)
    rate_sum = np.zeros(len(ts))
    rate_sum_sq = np.zeros(len(ts))

    for trial in range(n_trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        mean_count = params.lambda0 * math.pi * r_sim * r_sim
        count = int(rng.poisson(mean_count))
        while count == 0:
            count = int(rng.poisson(mean_count))
        points = _uniform_disc(rng, count, r_sim)
        dist_sq = points[:, 0] ** 2 + points[:, 1] ** 2
        nearest = int(np.argmin(dist_sq))
        u0 = math.sqrt(dist_sq[nearest])
        serving0 = points[nearest]
        interferers0 = np.delete(points, nearest, axis=0)
        traj = TrajectorySet(rng, interferers0.shape[0], mobility, t_max)
        serving_traj = None
        if model is ServiceModel.UE_INDEPENDENT:
            serving_traj = TrajectorySet(rng, 1, MobilitySpec(kind=MobilityKind.STRAIGHT, v=mobility.v), t_max)

        for i, t in enumerate(ts):
            pos = traj.positions(interferers0, t)
            u_sq = pos[:, 0] ** 2 + pos[:, 1] ** 2
            h_serv = rng.exponential()
            h_int = rng.exponential(size=u_sq.shape[0])
            if model is ServiceModel.UE_DEPENDENT:
                u0_t_sq = max(u0 - mobility.v * t, 0.0) ** 2
                keep = u_sq <= r_eval_sq
                interference = float(np.sum(h_int[keep] * (u_sq[keep] + h2) ** (-half_alpha)))
                signal = h_serv * (u0_t_sq + h2) ** (-half_alpha)
            else:
                serving_pos = serving_traj.positions(serving0[None, :], t)[0]
                cand_sq = np.concatenate(([serving_pos[0] ** 2 + serving_pos[1] ** 2], u_sq))
                cand_h = np.concatenate(([h_serv], h_int))
                best = int(np.argmin(cand_sq))
                power = cand_h * (cand_sq + h2) ** (-half_alpha)
                keep = cand_sq <= r_eval_sq
                keep[best] = False
                interference = float(np.sum(power[keep]))
                signal = float(power[best])
            sinr = signal / (noise_over_p + interference + far_mean)
            cov_counts[i] += sinr >= gammas
            log_rate = math.log1p(sinr)
            rate_sum[i] += log_rate
            rate_sum_sq[i] += log_rate * log_rate
            if record is not None:
                record.append((trial, t, sinr))

    coverage = [[_estimate_from_sums(float(cov_counts[i, j]), float(cov_counts[i, j]), n_trials)
                 for j in range(gammas.size)] for i in range(len(ts))]
    rates = [_estimate_from_sums(rate_sum[i], rate_sum_sq[i], n_trials) for i in range(len(ts))]
    return coverage, rates


def empirical_coverage(gamma, t, model, mobility, params, n_trials, seed):
    cov, _ = simulate_grid(params, model, mobility, [t], [gamma], n_trials, seed)
    return cov[0][0]


def empirical_rate(t, model, mobility, params, n_trials, seed):
    _, rates = simulate_grid(params, model, mobility, [t], [1.0], n_trials, seed)
    return rates[0]


def displaced_interferer_histogram(u0, t, v, lambda0, n_points, seed,
                                   r_max=2000.0, bin_width=10.0):
    """Histogram oracle for the displaced-field density.

    Sources are n_points positions uniform on the annulus [u0, r_max + v*t + 1]
    (everything able to land within r_max); each hops a distance v*t at an
    independent uniform angle. Expected bin counts integrate the closed-form
    displaced density over each bin, scaled to the sampled population.
    Returns (edges, counts, expected, sigma) with sigma the per-bin binomial
    standard deviation.
    """
    from .density import expected_annulus_count

    d = v * t
    r_src = r_max + d + 1.0
    if r_src <= u0:
        raise ValueError("source annulus is empty")
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    edges = np.arange(0.0, r_max + 0.5 * bin_width, bin_width)
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    remaining = int(n_points)
    chunk = 4_000_000
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        u = np.sqrt(u0 * u0 + rng.random(m) * (r_src * r_src - u0 * u0))
        cos_angle = np.cos(2.0 * math.pi * rng.random(m))
        u_y = np.sqrt(np.maximum(u * u + d * d - 2.0 * u * d * cos_angle, 0.0))
        counts += np.histogram(u_y, bins=edges)[0]

    area = math.pi * (r_src * r_src - u0 * u0)
    scale = n_points / (lambda0 * area)
    expected = np.array([
        expected_annulus_count(u0, t, v, lambda0, lo, hi) * scale
        for lo, hi in zip(edges[:-1], edges[1:])
    ])
    p = expected / n_points
    sigma = np.sqrt(n_points * p * (1.0 - p))
    return edges, counts, expected, sigma


def displacement_invariance_check(lambda0, v, t, seed, n_reps=50, r_test=5000.0,
                                  n_radial=4, n_sectors=5):
    """Straight-line displacement of a homogeneous field leaves counts in
    fixed regions Poisson with the same mean. Aggregates counts over n_reps
    independent deployments in 20 equal-area regions (by default) and tests
    them against the Poisson mean with a chi-square statistic.

    Returns (chi2_statistic, p_value, observed, expected_per_region).
    """
    d = v * t
    r_src = r_test + d + 1.0
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    radii = r_test * np.sqrt(np.arange(1, n_radial + 1) / n_radial)
    n_regions = n_radial * n_sectors
    observed = np.zeros(n_regions, dtype=np.int64)
    mean_count = lambda0 * math.pi * r_src * r_src
    for _ in range(n_reps):
        count = int(rng.poisson(mean_count))
        points = _uniform_disc(rng, count, r_src)
        moved = points + v * t * _unit_vectors(2.0 * math.pi * rng.random(count))
        r = np.hypot(moved[:, 0], moved[:, 1])
        inside = r <= r_test
        ring_idx = np.searchsorted(radii, r[inside])
        angle = np.mod(np.arctan2(moved[inside, 1], moved[inside, 0]), 2.0 * math.pi)
        sector_idx = np.minimum((angle / (2.0 * math.pi / n_sectors)).astype(int), n_sectors - 1)
        np.add.at(observed, ring_idx * n_sectors + sector_idx, 1)
    expected = n_reps * lambda0 * math.pi * r_test * r_test / n_regions
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    p_value = float(stats.chi2.sf(chi2, df=n_regions))
    return chi2, p_value, observed, expected


def serving_distance_ks(lambda0, n_draws, seed, r_sim=None):
    """KS distance between sampled nearest-drone ground distances and their
    Rayleigh law 1 - exp(-pi*lambda0*u^2)."""
    if r_sim is None:
        r_sim = default_eval_radius(lambda0)
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    mean_count = lambda0 * math.pi * r_sim * r_sim
    draws = np.empty(n_draws)
    for i in range(n_draws):
        count = int(rng.poisson(mean_count))
        while count == 0:
            count = int(rng.poisson(mean_count))
        pts = _uniform_disc(rng, count, r_sim)
        draws[i] = math.sqrt(np.min(pts[:, 0] ** 2 + pts[:, 1] ** 2))
    result = stats.kstest(draws, lambda u: 1.0 - np.exp(-math.pi * lambda0 * u * u))
    return float(result.statistic), draws
