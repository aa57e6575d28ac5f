"""Request and response models for the HTTP service."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .config import ConfigError, DEFAULTS
from .params import MobilityKind, NetworkParams, ServiceModel, db_to_linear


class ParamsModel(BaseModel):
    lambda0: float = DEFAULTS["lambda0"]
    h_m: float = DEFAULTS["h_m"]
    v_mps: float = DEFAULTS["v_mps"]
    alpha: float = DEFAULTS["alpha"]
    p_tx_db: float = DEFAULTS["p_tx_db"]
    p_edge: float = DEFAULTS["p_edge"]
    r_d_m: float = DEFAULTS["r_d_m"]
    n0_watts: Optional[float] = None
    no_noise: bool = False

    def to_params(self):
        n0 = 0.0 if self.no_noise else self.n0_watts
        return NetworkParams(
            lambda0=self.lambda0, h=self.h_m, v=self.v_mps, alpha=self.alpha,
            p=db_to_linear(self.p_tx_db), n0=n0, r_d=self.r_d_m, p_edge=self.p_edge,
        )


class MobilityModel(BaseModel):
    kind: Literal["straight-line", "random-walk", "random-waypoint"] = "straight-line"
    rw_epoch_s: float = Field(default=10.0, gt=0)
    rwp_waypoint_radius_m: float = Field(default=500.0, gt=0)
    pause_s: float = Field(default=0.0, ge=0)

    def to_spec(self, v):
        return {
            "kind": MobilityKind(self.kind), "v": v, "rw_epoch": self.rw_epoch_s,
            "rwp_waypoint_radius": self.rwp_waypoint_radius_m, "pause": self.pause_s,
        }


def service_model(model: int):
    return ServiceModel.UE_INDEPENDENT if model == 1 else ServiceModel.UE_DEPENDENT


class DensityRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    u0_m: float = Field(default=500.0, ge=0)
    ts_s: List[float] = Field(default=[20.0, 40.0, 50.0, 200.0], min_length=1)
    step_m: float = Field(default=1.0, gt=0)
    u_max_m: Optional[float] = Field(default=None, gt=0)


class DensityPoint(BaseModel):
    u_x_m: float
    lambda_per_m2: float
    region: str


class DensityProfileModel(BaseModel):
    t_s: float
    points: List[DensityPoint]


class DensityResponse(BaseModel):
    u0_m: float
    profiles: List[DensityProfileModel]


class CoverageRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    model: Literal[1, 2] = 2
    ts_s: List[float] = Field(default=[0.0, 20.0, 40.0, 50.0, 200.0], min_length=1)
    gammas_db: List[float] = Field(default=[-5.0, 0.0, 5.0], min_length=1)
    include_rate: bool = True


class SweepPoint(BaseModel):
    t_s: float
    gamma_db: float
    coverage: float
    rate_nats: float
    method: str
    ci_half_width: float


class CoverageResponse(BaseModel):
    model: int
    points: List[SweepPoint]


class RateRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    model: Literal[1, 2] = 2
    ts_s: List[float] = Field(default=[0.0, 25.0, 50.0, 100.0, 200.0], min_length=1)
    gammas_db: List[float] = Field(default=[0.0], min_length=1)


class SimulateRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    model: Literal[1, 2] = 2
    mobility: MobilityModel = MobilityModel()
    ts_s: List[float] = Field(default=[0.0, 20.0, 50.0, 200.0], min_length=1)
    gammas_db: List[float] = Field(default=[-5.0, 0.0, 5.0], min_length=1)
    n_trials: int = Field(default=10_000, ge=100)
    seed: int = Field(default=1, ge=0)
    record_trials: bool = False

    @model_validator(mode="after")
    def _bounded_record(self):
        if self.record_trials and self.n_trials * len(self.ts_s) > 2_000_000:
            raise ValueError("record_trials limited to 2e6 rows; lower n_trials or ts_s")
        return self


class TrialRow(BaseModel):
    trial: int
    t_s: float
    sinr_db: float


class SimulateResponse(BaseModel):
    model: int
    points: List[SweepPoint]
    trials: Optional[List[TrialRow]] = None


class ValidateRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    n_trials: int = Field(default=100_000, ge=100)
    mobility_trials: Optional[int] = Field(default=None, ge=100)
    hist_points: int = Field(default=10_000_000, ge=10_000)
    seed: Optional[int] = Field(default=None, ge=0)
    negative_control: bool = False


class CheckModel(BaseModel):
    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str


class ValidateResponse(BaseModel):
    report: dict
    all_passed: bool


class CompareMobilityRequest(BaseModel):
    params: ParamsModel = ParamsModel()
    mobility: MobilityModel = MobilityModel()
    ts_s: List[float] = Field(default=[25.0, 50.0, 100.0], min_length=1)
    n_trials: int = Field(default=20_000, ge=100)
    seed: int = Field(default=1, ge=0)


class MobilityRateRow(BaseModel):
    t_s: float
    kind: str
    rate_nats: float
    ci_half_width: float
    flagged: bool


class CompareMobilityResponse(BaseModel):
    rows: List[MobilityRateRow]
    bound_satisfied: bool


class HealthResponse(BaseModel):
    status: str
    version: str


__all__ = [
    "ConfigError", "ParamsModel", "MobilityModel", "service_model",
    "DensityRequest", "DensityResponse", "DensityProfileModel", "DensityPoint",
    "CoverageRequest", "CoverageResponse", "SweepPoint",
    "RateRequest", "SimulateRequest", "SimulateResponse", "TrialRow",
    "ValidateRequest", "ValidateResponse", "CheckModel",
    "CompareMobilityRequest", "CompareMobilityResponse", "MobilityRateRow",
    "HealthResponse",
]
