"""Command-line interface: path simulation, estimation, Monte Carlo tables.

Subcommands
-----------
simulate   one msfOU path to CSV (columns t,value)
estimate   one estimator applied to a path CSV, result to JSON
mc-table   Monte Carlo summary row for a config JSON
mc-clt     standardized-error sample (CSV) plus its moment summary (JSON)
mc-rate    scaled-error sdev across a grid of time horizons

All outputs are deterministic functions of the inputs: numbers are
formatted with %.15g, JSON keys are sorted, no timestamps are emitted, and
worker counts never change any byte of output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .estimators import (
    Method,
    lse_skorohod,
    nonergodic_estimator,
    practical_estimator,
)
from .harness import (
    ExperimentConfig,
    run_clt_experiment,
    run_rate_experiment,
    run_table_experiment,
)
from .mle import mle
from .noise import HurstParam
from .paths import euler_msfou, read_path_csv, write_path_csv

__all__ = ["main"]


def _fmt(x) -> str:
    return format(float(x), ".15g")


def _load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return ExperimentConfig.from_dict(raw)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _stats_payload(stats) -> dict:
    return {
        "mean": stats.mean,
        "median": stats.median,
        "sdev": stats.sdev,
        "skewness": stats.skewness,
        "kurtosis": stats.kurtosis,
        "n_failed": stats.n_failed,
    }


def _cmd_simulate(args: argparse.Namespace) -> int:
    n_steps = int(round(args.T / args.d))
    path = euler_msfou(
        theta=args.theta,
        H=HurstParam(args.hurst),
        d=args.d,
        N=n_steps,
        seed=args.seed,
        x0=args.x0,
    )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_path_csv(path, fh)
    return 0


def _cmd_estimate(args: argparse.Namespace) -> int:
    with open(args.path_in, "r", encoding="utf-8") as fh:
        path = read_path_csv(fh)
    method = Method(args.method)
    if method is Method.NONERGODIC:
        result = nonergodic_estimator(path)
    else:
        if args.hurst is None:
            raise SystemExit(f"--hurst is required for method {method.value}")
        hurst = HurstParam(args.hurst)
        if method is Method.PRACTICAL:
            result = practical_estimator(path, hurst)
        elif method is Method.LSE_SKOROHOD:
            if args.theta_ref is None:
                raise SystemExit("--theta-ref is required for method lse")
            result = lse_skorohod(path, hurst, args.theta_ref)
        else:
            result = mle(path, hurst, args.mesh)
    payload = {
        "theta_hat": result.theta_hat,
        "method": result.method.value,
        "denominator": result.denominator,
        "diagnostics": result.diagnostics,
    }
    _write_json(args.out, payload)
    return 0


def _cmd_mc_table(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    stats = run_table_experiment(cfg, workers=args.workers)
    header = "theta_true,H,d,T,reps,mean,median,sdev,n_failed"
    row = ",".join(
        [
            _fmt(cfg.theta_true),
            _fmt(cfg.H),
            _fmt(cfg.d),
            _fmt(cfg.T),
            str(cfg.replications),
            _fmt(stats.mean),
            _fmt(stats.median),
            _fmt(stats.sdev),
            str(stats.n_failed),
        ]
    )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n" + row + "\n")
    return 0


def _cmd_mc_clt(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    phi, stats = run_clt_experiment(cfg, workers=args.workers)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("phi\n")
        for value in phi:
            fh.write(_fmt(value) + "\n")
    _write_json(args.stats, _stats_payload(stats))
    return 0


def _cmd_mc_rate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    t_grid = [float(tok) for tok in args.t_grid.split(",") if tok.strip()]
    if not t_grid:
        raise SystemExit("--T-grid must list at least one horizon")
    rows = run_rate_experiment(cfg, t_grid, workers=args.workers)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("T,scaled_sdev,n_failed\n")
        for big_t, sdev, n_failed in rows:
            fh.write(f"{_fmt(big_t)},{_fmt(sdev)},{n_failed}\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msfou",
        description="Simulation and drift estimation for the mixed "
        "sub-fractional Ornstein-Uhlenbeck process.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate one path to CSV")
    p_sim.add_argument("--theta", type=float, required=True)
    p_sim.add_argument("--hurst", type=float, required=True)
    p_sim.add_argument("--d", type=float, required=True)
    p_sim.add_argument("--T", type=float, required=True, dest="T")
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--x0", type=float, default=0.0)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate the drift from a path CSV")
    p_est.add_argument(
        "--method", required=True, choices=[m.value for m in Method]
    )
    p_est.add_argument("--hurst", type=float, default=None)
    p_est.add_argument("--theta-ref", type=float, default=None, dest="theta_ref")
    p_est.add_argument("--mesh", type=int, default=128)
    p_est.add_argument("--in", required=True, dest="path_in")
    p_est.add_argument("--out", required=True)
    p_est.set_defaults(func=_cmd_estimate)

    p_table = sub.add_parser("mc-table", help="Monte Carlo table row")
    p_table.add_argument("--config", required=True)
    p_table.add_argument("--out", required=True)
    p_table.add_argument("--workers", type=int, default=1)
    p_table.set_defaults(func=_cmd_mc_table)

    p_clt = sub.add_parser("mc-clt", help="standardized-error sample and summary")
    p_clt.add_argument("--config", required=True)
    p_clt.add_argument("--out", required=True)
    p_clt.add_argument("--stats", required=True)
    p_clt.add_argument("--workers", type=int, default=1)
    p_clt.set_defaults(func=_cmd_mc_clt)

    p_rate = sub.add_parser("mc-rate", help="scaled-error sdev across horizons")
    p_rate.add_argument("--config", required=True)
    p_rate.add_argument("--T-grid", required=True, dest="t_grid")
    p_rate.add_argument("--out", required=True)
    p_rate.add_argument("--workers", type=int, default=1)
    p_rate.set_defaults(func=_cmd_mc_rate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
