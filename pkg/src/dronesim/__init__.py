"""Time-varying coverage and rate of a mobile drone base-station network.

Core modules: params (scalar inputs and geometry), density (displaced
interferer field), analytic (quadrature engine), mc (Monte Carlo engine),
validation (cross-engine self-checks). service exposes them over HTTP and
cli is a thin client over the service.
"""

__version__ = "0.1.0"

from .params import (MobilityKind, NetworkParams, ServiceModel, cell_edge_distance,
                     db_to_linear, linear_to_db, link_distance, noise_power,
                     serving_ground_distance_model2)

__all__ = [
    "MobilityKind", "NetworkParams", "ServiceModel", "cell_edge_distance",
    "db_to_linear", "linear_to_db", "link_distance", "noise_power",
    "serving_ground_distance_model2", "__version__",
]
