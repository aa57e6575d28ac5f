"""Command-line front end.

Thin client: every command posts to the HTTP service (in-process by default,
remote with --server) and writes CSV/JSON outputs client-side. Thresholds in
dB cross the boundary here; everything behind the service is linear.

Exit codes: 0 success, 1 validation/bound failure or runtime error,
2 configuration error.
"""

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

import httpx

from . import __version__
from .config import ConfigError, config_lines, load_config, parse_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

NATS_TO_BITS = 1.0 / math.log(2.0)

PRESETS = {
    "fig3": {"u0": 500.0, "ts": [20.0, 40.0, 50.0, 200.0]},
    "fig4": {"ts": [0.0, 20.0, 40.0, 50.0, 100.0, 200.0], "gammas_db": [-5.0, 0.0, 5.0]},
    "fig5": {"ts": [0.0, 25.0, 50.0, 100.0, 200.0], "gammas_db": [0.0],
             "alphas": [2.5, 3.0, 3.5], "heights": [100.0, 200.0]},
}


class ServiceClient:
    """POSTs to a remote server when given a URL, otherwise runs the app
    in-process."""

    def __init__(self, server=None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app
            self._client = TestClient(app)

    def post(self, path, payload):
        resp = self._client.post(path, json=payload)
        if resp.status_code in (400, 422):
            raise ConfigError(_error_detail(resp))
        resp.raise_for_status()
        return resp.json()

    def get(self, path):
        resp = self._client.get(path)
        resp.raise_for_status()
        return resp.json()


def _error_detail(resp):
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    return json.dumps(detail) if isinstance(detail, (list, dict)) else str(detail)


def _parse_floats(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"empty list {text!r}")
    return values


def _load_params(args):
    overrides = {}
    if getattr(args, "n0_watts", None) is not None:
        overrides["n0_watts"] = args.n0_watts
    if args.config:
        try:
            return load_config(args.config, overrides)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    return parse_config("", overrides)


def _params_payload(params, no_noise=False):
    return {
        "lambda0": params.lambda0, "h_m": params.h, "v_mps": params.v,
        "alpha": params.alpha, "p_tx_db": 10.0 * math.log10(params.p),
        "p_edge": params.p_edge, "r_d_m": params.r_d, "n0_watts": params.n0,
        "no_noise": no_noise,
    }


def _echo_lines(params, extra):
    lines = list(config_lines(params))
    lines.extend(f"{key} = {value}" for key, value in extra)
    lines.append(f"generated_at = {datetime.now(timezone.utc).isoformat()}")
    return lines


def _open_out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_csv(path, header, rows, echo):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in echo:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")
    print(f"wrote {path}")


def _cell(x):
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_gnuplot(args, name, xlabel, ylabel, clauses):
    path = _open_out(args, f"plot_{name}.gp")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# gnuplot script; run from the output directory\n")
        fh.write('set datafile separator ","\n')
        fh.write(f'set xlabel "{xlabel}"\n')
        fh.write(f'set ylabel "{ylabel}"\n')
        fh.write("set key bottom right\n")
        fh.write("plot " + ", \\\n     ".join(clauses) + "\n")
    print(f"wrote {path}")


def run_density(args):
    params = _load_params(args)
    preset = PRESETS["fig3"] if args.preset == "fig3" else None
    u0 = args.u0 if args.u0 is not None else (preset["u0"] if preset else 500.0)
    ts = (_parse_floats(args.t) if args.t is not None
          else (preset["ts"] if preset else [20.0, 40.0, 50.0, 200.0]))
    client = ServiceClient(args.server)
    payload = {"params": _params_payload(params), "u0_m": u0, "ts_s": ts, "step_m": args.step}
    if args.u_max is not None:
        payload["u_max_m"] = args.u_max
    data = client.post("/api/density", payload)
    clauses = []
    for profile in data["profiles"]:
        t = profile["t_s"]
        rows = [(p["u_x_m"], p["lambda_per_m2"], p["region"]) for p in profile["points"]]
        echo = _echo_lines(params, [("command", "density"), ("u0_m", u0), ("t_s", t),
                                    ("step_m", args.step)])
        name = f"density_t{t:g}.csv"
        _write_csv(_open_out(args, name), ["u_x_m", "lambda_per_m2", "region"], rows, echo)
        clauses.append(f'"{name}" using 1:2 with lines title "t={t:g} s"')
    if args.gnuplot:
        _write_gnuplot(args, "density", "u_x, m", "interferer density, 1/m^2", clauses)
    return EXIT_OK


def _sweep_rows(points):
    return [(p["t_s"], p["gamma_db"], p["coverage"],
             math.nan if p["rate_nats"] is None else p["rate_nats"],
             p["method"], p["ci_half_width"]) for p in points]


SWEEP_HEADER = ["t_s", "gamma_db", "coverage", "rate_nats", "method", "ci_half_width"]


def _run_analytic_sweep(args, endpoint, default_ts, default_gammas):
    params = _load_params(args)
    preset = PRESETS.get(args.preset) if args.preset else None
    ts = _parse_floats(args.t) if args.t is not None else (preset["ts"] if preset else default_ts)
    gammas = (_parse_floats(args.gamma_db) if args.gamma_db is not None
              else (preset["gammas_db"] if preset else default_gammas))
    models = [1, 2] if args.model == "both" else [int(args.model)]
    noise_variants = [args.no_noise]
    if preset and args.preset == "fig4":
        noise_variants = [False, True]
    client = ServiceClient(args.server)

    param_sets = [("", params)]
    if preset and args.preset == "fig5":
        # Rebuild params per variant so the noise floor re-dimensions with
        # alpha and height instead of carrying over.
        base = {"lambda0": params.lambda0, "h_m": params.h, "v_mps": params.v,
                "p_tx_db": 10.0 * math.log10(params.p), "p_edge": params.p_edge,
                "r_d_m": params.r_d}
        param_sets = [(f"_alpha{alpha:g}", parse_config("", dict(base, alpha=alpha)))
                      for alpha in preset["alphas"]]
        param_sets += [(f"_h{h:g}", parse_config("", dict(base, alpha=3.0, h_m=h)))
                       for h in preset["heights"]]

    clauses = []
    for tag, prm in param_sets:
        for model in models:
            for no_noise in noise_variants:
                payload = {"params": _params_payload(prm, no_noise=no_noise),
                           "model": model, "ts_s": ts, "gammas_db": gammas}
                if endpoint == "/api/coverage":
                    payload["include_rate"] = not args.skip_rate
                data = client.post(endpoint, payload)
                rows = _sweep_rows(data["points"])
                suffix = "_nonoise" if no_noise else ""
                name = f"{args.command}{tag}_model{model}{suffix}.csv"
                echo_params = prm.without_noise() if no_noise else prm
                echo = _echo_lines(echo_params, [("command", args.command), ("model", model),
                                                 ("t_list_s", ",".join(f"{t:g}" for t in ts)),
                                                 ("gamma_list_db", ",".join(f"{g:g}" for g in gammas))])
                _write_csv(_open_out(args, name), SWEEP_HEADER, rows, echo)
                label = f"model {model}" + (f" {tag.lstrip('_')}" if tag else "")
                if no_noise:
                    label += " no-noise"
                ycol = "$4" if args.command == "rate" else "$3"
                clauses.extend(
                    f'"{name}" using 1:($2=={g:.17g}?{ycol}:1/0) with linespoints '
                    f'title "{label} g={g:g} dB"' for g in gammas)
                if args.command == "rate" and args.bits:
                    for p in data["points"]:
                        print(f"{label} t={p['t_s']:g}s: "
                              f"{p['rate_nats']:.6f} nats = {p['rate_nats'] * NATS_TO_BITS:.6f} bits")
    if args.gnuplot:
        ylabel = "rate, nats" if args.command == "rate" else "coverage probability"
        _write_gnuplot(args, args.command, "t, s", ylabel, clauses)
    return EXIT_OK


def run_coverage(args):
    return _run_analytic_sweep(args, "/api/coverage",
                               [0.0, 20.0, 40.0, 50.0, 200.0], [-5.0, 0.0, 5.0])


def run_rate(args):
    return _run_analytic_sweep(args, "/api/rate",
                               [0.0, 25.0, 50.0, 100.0, 200.0], [0.0])


def run_simulate(args):
    params = _load_params(args)
    ts = _parse_floats(args.t) if args.t is not None else [0.0, 20.0, 50.0, 200.0]
    gammas = _parse_floats(args.gamma_db) if args.gamma_db is not None else [-5.0, 0.0, 5.0]
    client = ServiceClient(args.server)
    payload = {
        "params": _params_payload(params, no_noise=args.no_noise),
        "model": int(args.model),
        "mobility": {"kind": args.mobility, "rw_epoch_s": args.rw_epoch,
                     "rwp_waypoint_radius_m": args.rwp_radius, "pause_s": args.pause},
        "ts_s": ts, "gammas_db": gammas, "n_trials": args.trials, "seed": args.seed,
        "record_trials": args.record_trials,
    }
    data = client.post("/api/simulate", payload)
    echo_params = params.without_noise() if args.no_noise else params
    extra = [("command", "simulate"), ("model", args.model), ("mobility", args.mobility),
             ("n_trials", args.trials), ("seed", args.seed)]
    name = f"simulate_model{args.model}.csv"
    _write_csv(_open_out(args, name), SWEEP_HEADER,
               _sweep_rows(data["points"]), _echo_lines(echo_params, extra))
    if args.gnuplot:
        _write_gnuplot(args, "simulate", "t, s", "coverage probability",
                       [f'"{name}" using 1:($2=={g:.17g}?$3:1/0) with linespoints '
                        f'title "model {args.model} mc g={g:g} dB"' for g in gammas])
    if args.record_trials and data.get("trials"):
        rows = []
        for row in data["trials"]:
            for g_db in gammas:
                rows.append((row["trial"], row["t_s"], g_db, row["sinr_db"],
                             int(row["sinr_db"] >= g_db)))
        _write_csv(_open_out(args, "trials.csv"),
                   ["trial", "t_s", "gamma_db", "sinr_db", "covered"],
                   rows, _echo_lines(echo_params, extra))
    return EXIT_OK


def run_validate(args):
    params = _load_params(args)
    client = ServiceClient(args.server)
    payload = {"params": _params_payload(params), "n_trials": args.trials,
               "hist_points": args.hist_points, "seed": args.seed,
               "negative_control": args.negative_control}
    if args.mobility_trials is not None:
        payload["mobility_trials"] = args.mobility_trials
    data = client.post("/api/validate", payload)
    report = data["report"]
    path = _open_out(args, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")
    for check in report["checks"]:
        verdict = "pass" if check["passed"] else "FAIL"
        print(f"{verdict}  {check['name']}: statistic={check['statistic']:.6g} "
              f"threshold={check['threshold']:.6g}")
    if not data["all_passed"]:
        print("validation FAILED", file=sys.stderr)
        return EXIT_FAILURE
    print("validation passed")
    return EXIT_OK


def run_compare_mobility(args):
    params = _load_params(args)
    ts = _parse_floats(args.t) if args.t is not None else [25.0, 50.0, 100.0]
    client = ServiceClient(args.server)
    payload = {
        "params": _params_payload(params),
        "mobility": {"kind": "straight-line", "rw_epoch_s": args.rw_epoch,
                     "rwp_waypoint_radius_m": args.rwp_radius, "pause_s": args.pause},
        "ts_s": ts, "n_trials": args.trials, "seed": args.seed,
    }
    data = client.post("/api/compare-mobility", payload)
    rows = [(r["t_s"], r["kind"], r["rate_nats"], r["ci_half_width"], int(r["flagged"]))
            for r in data["rows"]]
    echo = _echo_lines(params, [("command", "compare-mobility"), ("n_trials", args.trials),
                                ("seed", args.seed), ("rw_epoch_s", args.rw_epoch),
                                ("rwp_waypoint_radius_m", args.rwp_radius),
                                ("pause_s", args.pause)])
    _write_csv(_open_out(args, "mobility_rates.csv"),
               ["t_s", "kind", "rate_nats", "ci_half_width", "flagged"], rows, echo)
    if args.gnuplot:
        kinds = list(dict.fromkeys(r["kind"] for r in data["rows"]))
        _write_gnuplot(args, "compare_mobility", "t, s", "rate, nats",
                       [f'"mobility_rates.csv" using 1:(strcol(2) eq "{k}" ? $3 : 1/0) '
                        f'with linespoints title "{k}"' for k in kinds])
    for r in data["rows"]:
        flag = "  <-- below straight-line bound" if r["flagged"] else ""
        print(f"t={r['t_s']:g}s {r['kind']:>16s}: {r['rate_nats']:.4f} "
              f"+-{r['ci_half_width']:.4f}{flag}")
    if not data["bound_satisfied"]:
        print("mobility bound violated", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def run_serve(args):
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_common(sub, mc_command=False, plots=True):
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--server", help="remote service URL (default: in-process)")
    sub.add_argument("--n0-watts", type=float, dest="n0_watts",
                     help="override the dimensioned noise power")
    if plots:
        sub.add_argument("--gnuplot", action="store_true",
                         help="also write a gnuplot script plotting the CSVs")
    if mc_command:
        sub.add_argument("--seed", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="dronesim",
                                     description="Mobile drone network coverage and rate")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    density = commands.add_parser("density", help="displaced interferer density profiles")
    _add_common(density)
    density.add_argument("--u0", type=float, help="exclusion radius at t=0, m (default 500)")
    density.add_argument("--t", help="comma-separated times, s")
    density.add_argument("--step", type=float, default=1.0)
    density.add_argument("--u-max", type=float, dest="u_max")
    density.add_argument("--preset", choices=["fig3"])
    density.set_defaults(func=run_density)

    for name, helptext in (("coverage", "analytic coverage sweep"),
                           ("rate", "analytic rate sweep")):
        cmd = commands.add_parser(name, help=helptext)
        _add_common(cmd)
        cmd.add_argument("--model", choices=["1", "2", "both"], default="both")
        cmd.add_argument("--t", help="comma-separated times, s")
        cmd.add_argument("--gamma-db", dest="gamma_db", help="comma-separated thresholds, dB")
        cmd.add_argument("--no-noise", action="store_true")
        cmd.add_argument("--skip-rate", action="store_true",
                         help="leave the rate column empty (faster coverage sweeps)")
        cmd.add_argument("--preset", choices=["fig4", "fig5"])
        cmd.add_argument("--bits", action="store_true",
                         help="also print rates converted to bits")
        cmd.set_defaults(func=run_coverage if name == "coverage" else run_rate)

    simulate = commands.add_parser("simulate", help="Monte Carlo coverage and rate")
    _add_common(simulate, mc_command=True)
    simulate.add_argument("--model", choices=["1", "2"], default="2")
    simulate.add_argument("--t", help="comma-separated times, s")
    simulate.add_argument("--gamma-db", dest="gamma_db")
    simulate.add_argument("--trials", type=int, default=10_000)
    simulate.add_argument("--mobility", choices=["straight-line", "random-walk", "random-waypoint"],
                          default="straight-line")
    simulate.add_argument("--rw-epoch", type=float, default=10.0)
    simulate.add_argument("--rwp-radius", type=float, default=500.0)
    simulate.add_argument("--pause", type=float, default=0.0)
    simulate.add_argument("--no-noise", action="store_true")
    simulate.add_argument("--record-trials", action="store_true")
    simulate.set_defaults(func=run_simulate)

    validate = commands.add_parser("validate", help="run the full self-check suite")
    _add_common(validate, plots=False)
    validate.add_argument("--seed", type=int, default=None,
                          help="derive check seeds from N; default uses pinned "
                               "per-check seeds (statistical checks false-alarm "
                               "at their significance level under arbitrary seeds)")
    validate.add_argument("--trials", type=int, default=100_000)
    validate.add_argument("--mobility-trials", type=int, dest="mobility_trials")
    validate.add_argument("--hist-points", type=int, default=10_000_000)
    validate.add_argument("--negative-control", action="store_true",
                          help="corrupt the density check on purpose (harness self-test)")
    validate.set_defaults(func=run_validate)

    compare = commands.add_parser("compare-mobility",
                                  help="straight-line vs direction-changing rates")
    _add_common(compare, mc_command=True)
    compare.add_argument("--t", help="comma-separated times, s")
    compare.add_argument("--trials", type=int, default=20_000)
    compare.add_argument("--rw-epoch", type=float, default=10.0)
    compare.add_argument("--rwp-radius", type=float, default=500.0)
    compare.add_argument("--pause", type=float, default=0.0)
    compare.set_defaults(func=run_compare_mobility)

    serve = commands.add_parser("serve", help="run the HTTP service under uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=run_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except httpx.HTTPError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
