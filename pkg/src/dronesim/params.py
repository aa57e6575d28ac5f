"""Network parameters and the elementary geometry shared by all modules.

Distances are meters, times seconds, speeds m/s, powers linear watts.
Decibel conversion happens at the CLI/service boundary only.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class ServiceModel(Enum):
    """How the serving drone moves after association at t=0."""

    UE_INDEPENDENT = 1   # serving drone picks a random direction; handover allowed
    UE_DEPENDENT = 2     # serving drone flies toward the user's zenith and hovers


class MobilityKind(Enum):
    STRAIGHT = "straight-line"
    RANDOM_WALK = "random-walk"
    RANDOM_WAYPOINT = "random-waypoint"


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    if x <= 0:
        raise ValueError("dB conversion requires a positive linear value")
    return 10.0 * math.log10(x)


def link_distance(u, h):
    """3D distance between the ground user and a drone at ground-distance u.

    u is the horizontal distance of the drone's ground projection from the
    point under the drone plane's origin; h is the flight altitude.
    """
    if u < 0:
        raise ValueError("ground distance must be nonnegative")
    if h <= 0:
        raise ValueError("altitude must be positive")
    return math.hypot(u, h)


def serving_ground_distance_model2(u0, v, t):
    """Ground distance of a serving drone flying straight at the user's zenith.

    Starts at u0, closes at speed v, clamps at zero on arrival (the drone
    hovers once overhead).
    """
    if u0 < 0 or v < 0 or t < 0:
        raise ValueError("u0, v, t must be nonnegative")
    return max(u0 - v * t, 0.0)


def cell_edge_distance(lambda0, h, p_edge=0.05):
    """3D distance to the serving drone exceeded with probability p_edge.

    The nearest-drone ground distance U satisfies P[U > u] = exp(-pi*lambda0*u^2),
    so the edge ground distance solves exp(-pi*lambda0*u^2) = p_edge and the 3D
    edge distance is sqrt(h^2 + u^2).
    """
    if not 0 < p_edge < 1:
        raise ValueError("p_edge must lie in (0, 1)")
    if lambda0 <= 0 or h <= 0:
        raise ValueError("lambda0 and h must be positive")
    return math.sqrt(h * h - math.log(p_edge) / (math.pi * lambda0))


def noise_power(lambda0, h, alpha, p_edge=0.05):
    """Noise power that makes the cell-edge SNR exactly 0 dB at unit transmit power.

    With P = 1 W the received cell-edge signal power is d_edge^(-alpha), so
    N0 = d_edge^(-alpha) = (h^2 - ln(p_edge)/(pi*lambda0))^(-alpha/2).
    """
    if alpha <= 2:
        raise ValueError("path-loss exponent must exceed 2")
    d_edge = cell_edge_distance(lambda0, h, p_edge)
    return d_edge ** (-alpha)


@dataclass(frozen=True)
class NetworkParams:
    """All scalar inputs of the model. Immutable; safe to share across threads.

    n0 defaults to the cell-edge dimensioning above when not given explicitly.
    r_d is the nominal deployment radius; the engines only use it as an upper
    bound sanity check since both truncate adaptively.
    """

    lambda0: float
    h: float
    v: float
    alpha: float
    p: float = 1.0
    n0: Optional[float] = None
    r_d: float = 100_000.0
    p_edge: float = 0.05

    def __post_init__(self):
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.h <= 0:
            raise ValueError("h must be positive")
        if self.v < 0:
            raise ValueError("v must be nonnegative")
        if self.alpha <= 2:
            raise ValueError("alpha must exceed 2")
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.r_d <= 0:
            raise ValueError("r_d must be positive")
        if not 0 < self.p_edge < 1:
            raise ValueError("p_edge must lie in (0, 1)")
        if self.n0 is None:
            object.__setattr__(
                self, "n0", noise_power(self.lambda0, self.h, self.alpha, self.p_edge)
            )
        elif self.n0 < 0:
            raise ValueError("n0 must be nonnegative")

    def without_noise(self):
        return NetworkParams(
            lambda0=self.lambda0, h=self.h, v=self.v, alpha=self.alpha,
            p=self.p, n0=0.0, r_d=self.r_d, p_edge=self.p_edge,
        )

    def cell_edge_distance(self):
        return cell_edge_distance(self.lambda0, self.h, self.p_edge)
