"""Command-line entry point: config parsing, run-mode dispatch, CSV and
manifest emission.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import csv
import sys
import time

import numpy as np

from . import kernels
from .config import MODES, ConfigError, parse_config
from .estimator import adaptive_run
from .montecarlo import McConfig, mc_statistics
from .pipelines import run_full, run_reduced
from .stepping import IntegrationFailure

_FMT = "%.15g"


def _fmt(x):
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return "nan"
    return _FMT % x


def _write_stats_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "mean_energy", "std_energy", "mean_gradient",
                      "std_gradient", "mode_active"])
        for sample, mode in rows:
            out.writerow([_fmt(sample.t),
                          _fmt(sample.mean_energy),
                          _fmt(np.sqrt(max(sample.var_energy, 0.0))),
                          _fmt(sample.mean_gradient),
                          _fmt(np.sqrt(max(sample.var_gradient, 0.0))),
                          mode])


def _write_estimator_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "y_hat", "t0_hat", "epsilon", "newton_iters", "status"])
        for row in rows:
            out.writerow([_fmt(row["t"]), _fmt(row["y_hat"]), _fmt(row["t0_hat"]),
                          _fmt(row["epsilon"]), row["newton_iters"], row["status"]])


def _write_mc_csv(path, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "stat", "value", "stderr"])
        for row in rows:
            out.writerow([_fmt(row.t), row.stat, _fmt(row.value), _fmt(row.stderr)])


def _write_manifest(path, cfg, extra):
    with open(path, "w") as fh:
        fh.write("# mzuq run manifest\n")
        fh.write(f"backend = {kernels.get_backend()}\n")
        for name in ("mode", "nu", "n_modes", "n_pc", "lam", "dt", "t_end", "t0",
                     "n0", "lambda_stat", "alpha0", "alpha1", "warmup",
                     "confirm_window", "stride", "history_cap", "out_stride",
                     "samples", "seed", "out"):
            fh.write(f"{name} = {getattr(cfg, name)}\n")
        for key, value in extra.items():
            fh.write(f"{key} = {value}\n")


def run(cfg):
    """Dispatch the configured pipeline and write its outputs.

    Returns the process exit code.
    """
    prefix = cfg.out
    extra = {}
    wall_start = time.perf_counter()
    try:
        if cfg.mode == "mc":
            times = [round(j * cfg.out_stride * cfg.dt, 12)
                     for j in range(int(round(cfg.t_end / cfg.dt)) // cfg.out_stride + 1)]
            mc_cfg = McConfig(cfg.samples, cfg.seed, cfg.n_modes, cfg.nu,
                              cfg.dt, cfg.t_end, cfg.alpha0, cfg.alpha1)
            rows = mc_statistics(mc_cfg, times)
            _write_mc_csv(f"{prefix}_stats.csv", rows)
        elif cfg.mode == "adaptive":
            result = adaptive_run(cfg)
            _write_stats_csv(f"{prefix}_stats.csv", result.stats)
            _write_estimator_csv(f"{prefix}_estimator.csv", result.estimator_log)
            extra["switched"] = result.switched
            extra["t_min"] = _fmt(result.report.t_min)
            extra["t0_hat"] = _fmt(result.report.t0_hat)
            extra["y_hat"] = _fmt(result.report.y_hat)
            extra["epsilon_min"] = _fmt(result.report.epsilon_min)
            extra["newton_iterations_max"] = result.report.newton_iterations_max
            extra["phase1_step_seconds"] = _fmt(result.phase1_step_seconds)
            extra["phase2_step_seconds"] = _fmt(result.phase2_step_seconds)
            if not result.switched:
                extra["warning"] = ("NoSwitch: epsilon never confirmed a minimum; "
                                    "run completed in full-system mode")
        elif cfg.mode == "full":
            result = run_full(cfg)
            _write_stats_csv(f"{prefix}_stats.csv", result.stats)
            extra["step_seconds"] = _fmt(result.step_seconds)
        else:  # markovian / memory
            result = run_reduced(cfg, with_memory=(cfg.mode == "memory"))
            _write_stats_csv(f"{prefix}_stats.csv", result.stats)
            extra["step_seconds"] = _fmt(result.step_seconds)
    except IntegrationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    extra["wall_seconds"] = _fmt(time.perf_counter() - wall_start)
    _write_manifest(f"{prefix}_manifest", cfg, extra)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mzuq",
        description="Spectral UQ for viscous Burgers with Mori-Zwanzig "
                    "reduced models and adaptive memory-length estimation.")
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--nu", type=float)
    parser.add_argument("--n-modes", dest="n_modes", type=int)
    parser.add_argument("--n-pc", dest="n_pc", type=int)
    parser.add_argument("--lambda", dest="lam", type=int)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--t0", type=float)
    parser.add_argument("--n0", type=int)
    parser.add_argument("--lambda-stat", dest="lambda_stat", type=int)
    parser.add_argument("--alpha0", type=float)
    parser.add_argument("--alpha1", type=float)
    parser.add_argument("--warmup", type=int)
    parser.add_argument("--confirm-window", dest="confirm_window", type=int)
    parser.add_argument("--stride", type=int)
    parser.add_argument("--history-cap", dest="history_cap", type=int)
    parser.add_argument("--out-stride", dest="out_stride", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output path prefix")
    return parser


def main(argv=None):
    args = vars(_build_parser().parse_args(argv))
    path = args.pop("config")
    try:
        cfg = parse_config(path, args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
