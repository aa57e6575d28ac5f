"""HTTP service exposing the analytic engine, the Monte Carlo engine, and
the validation suite. The CLI talks to this app in-process by default; the
same app serves remotely under uvicorn via the `serve` subcommand.

Monte Carlo endpoints run synchronously in the request; keep n_trials
proportionate when serving interactive clients.
"""

import math

from fastapi import FastAPI, HTTPException

from . import __version__, analytic, mc, validation
from .density import build_profile
from .params import MobilityKind, ServiceModel, db_to_linear, linear_to_db
from .schemas import (CompareMobilityRequest, CompareMobilityResponse, CoverageRequest,
                      CoverageResponse, DensityRequest, DensityResponse, HealthResponse,
                      RateRequest, SimulateRequest, SimulateResponse, ValidateRequest,
                      ValidateResponse, service_model)

app = FastAPI(title="dronesim", version=__version__)


def _params(params_model):
    try:
        return params_model.to_params()
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _sweep_points(params, model, ts, gammas_db, include_rate):
    """One sweep row per (t, gamma). The time-invariant model is evaluated
    once at t=0 and echoed across the requested times."""
    model_enum = service_model(model)
    points = []
    rate_by_t, coverage_cache = {}, {}
    for t in ts:
        if t < 0:
            raise ValueError("t must be nonnegative")
        key_t = 0.0 if model_enum is ServiceModel.UE_INDEPENDENT else t
        rate_val = float("nan")
        if include_rate:
            if key_t not in rate_by_t:
                rate_by_t[key_t] = analytic.rate(key_t, model_enum, params).value
            rate_val = rate_by_t[key_t]
        for g_db in gammas_db:
            if (key_t, g_db) not in coverage_cache:
                coverage_cache[(key_t, g_db)] = analytic.coverage(
                    db_to_linear(g_db), key_t, model_enum, params)
            res = coverage_cache[(key_t, g_db)]
            points.append({
                "t_s": t, "gamma_db": g_db, "coverage": res.value,
                "rate_nats": rate_val, "method": "analytic", "ci_half_width": 0.0,
            })
    return points


@app.get("/api/health", response_model=HealthResponse)
def health():
    return {"status": "ok", "version": __version__}


@app.post("/api/density", response_model=DensityResponse)
def density(req: DensityRequest):
    params = _params(req.params)
    profiles = []
    for t in req.ts_s:
        if t < 0:
            raise HTTPException(status_code=400, detail="t must be nonnegative")
        prof = build_profile(req.u0_m, t, params.v, params.lambda0,
                             u_max=req.u_max_m, step=req.step_m)
        profiles.append({
            "t_s": t,
            "points": [{"u_x_m": float(u), "lambda_per_m2": float(lam), "region": reg}
                       for u, lam, reg in zip(prof.u_x, prof.lam, prof.region)],
        })
    return {"u0_m": req.u0_m, "profiles": profiles}


@app.post("/api/coverage", response_model=CoverageResponse)
def coverage(req: CoverageRequest):
    params = _params(req.params)
    try:
        points = _sweep_points(params, req.model, req.ts_s, req.gammas_db, req.include_rate)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return {"model": req.model, "points": points}


@app.post("/api/rate", response_model=CoverageResponse)
def rate(req: RateRequest):
    params = _params(req.params)
    try:
        points = _sweep_points(params, req.model, req.ts_s, req.gammas_db, True)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return {"model": req.model, "points": points}


@app.post("/api/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest):
    params = _params(req.params)
    mobility = mc.MobilitySpec(**req.mobility.to_spec(params.v))
    gammas = [db_to_linear(g) for g in req.gammas_db]
    record = [] if req.record_trials else None
    try:
        cov, rates = mc.simulate_grid(params, service_model(req.model), mobility,
                                      req.ts_s, gammas, req.n_trials, req.seed,
                                      record=record)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    points = []
    for i, t in enumerate(req.ts_s):
        for j, g_db in enumerate(req.gammas_db):
            est = cov[i][j]
            points.append({
                "t_s": t, "gamma_db": g_db, "coverage": est.mean,
                "rate_nats": rates[i].mean, "method": "monte-carlo",
                "ci_half_width": est.half_width_95,
            })
    trials = None
    if record is not None:
        trials = [{"trial": trial, "t_s": t,
                   "sinr_db": linear_to_db(s) if s > 0 else -math.inf}
                  for trial, t, s in record]
    return {"model": req.model, "points": points, "trials": trials}


@app.post("/api/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest):
    params = _params(req.params)
    report = validation.run_validation(
        params, n_trials=req.n_trials, hist_points=req.hist_points, seed=req.seed,
        mobility_trials=req.mobility_trials, corrupt_density=req.negative_control)
    return {"report": report, "all_passed": report["all_passed"]}


@app.post("/api/compare-mobility", response_model=CompareMobilityResponse)
def compare_mobility(req: CompareMobilityRequest):
    params = _params(req.params)
    kinds = (MobilityKind.STRAIGHT, MobilityKind.RANDOM_WALK, MobilityKind.RANDOM_WAYPOINT)
    estimates = {}
    for kind in kinds:
        spec_kwargs = req.mobility.to_spec(params.v)
        spec_kwargs["kind"] = kind
        mobility = mc.MobilitySpec(**spec_kwargs)
        _, rates = mc.simulate_grid(params, ServiceModel.UE_DEPENDENT, mobility,
                                    req.ts_s, [1.0], req.n_trials, req.seed)
        estimates[kind] = rates
    rows, all_ok = [], True
    for i, t in enumerate(req.ts_s):
        base = estimates[MobilityKind.STRAIGHT][i]
        for kind in kinds:
            est = estimates[kind][i]
            flagged = False
            if kind is not MobilityKind.STRAIGHT:
                ci = math.hypot(base.half_width_95, est.half_width_95)
                flagged = bool(est.mean < base.mean - 2.0 * ci)
                all_ok = all_ok and not flagged
            rows.append({"t_s": t, "kind": kind.value, "rate_nats": est.mean,
                         "ci_half_width": est.half_width_95, "flagged": flagged})
    return {"rows": rows, "bound_satisfied": all_ok}


def main():
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8000)


if __name__ == "__main__":
    main()
