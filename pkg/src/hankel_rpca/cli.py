"""Command line front end: ``hankel-rpca {synth,detect,flag,eval,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections import OrderedDict
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench
from .csvio import CsvFormatError, format_matrix_csv, parse_matrix_csv, write_matrix_csv
from .metrics import FlagParams, flag_anomalies, masked_errors
from .solvers import SolverConfig, default_gamma, ht_rmc, ht_rpca, rpca
from .synth import PAPER_SYNTH, SynthConfig, gen_mask, gen_synthetic

log = logging.getLogger("hankel_rpca")

SOLVERS = ("rpca", "ht-rpca", "ht-rmc")
NONZERO_EPS = 1e-12


class UsageError(Exception):
    pass


def _ratio_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=int, default=None, help="delay embedding length (Hankel solvers)")
    p.add_argument("--gamma", type=float, default=None, help="sparsity weight; default 1/sqrt(max(N, T))")
    p.add_argument("--rho0", type=float, default=5e-5)
    p.add_argument("--beta", type=float, default=1.1)
    p.add_argument("--rho-max", type=float, default=1e6)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--jobs", type=int, default=1, help="threads for per-slice SVDs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hankel-rpca",
        description="Low-rank Hankel tensor plus sparse anomaly decomposition of multivariate time series.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corrupted periodic dataset")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--t", type=int, default=1200)
    p.add_argument("--rank", type=int, default=4)
    p.add_argument("--sigma-u", type=float, default=20.0)
    p.add_argument("--sigma-s", type=float, default=40.0)
    p.add_argument("--sigma-noise", type=float, default=0.1)
    p.add_argument("--anomaly-ratio", type=float, default=0.1)
    p.add_argument("--missing-ratio", type=float, default=0.0,
                   help="also write observed.csv with this share of cells blanked")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("detect", help="decompose a matrix CSV into low-rank and sparse parts")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--header", action="store_true", help="skip the first line of the input")
    p.add_argument("--solver", choices=SOLVERS, default="ht-rpca")
    _add_solver_args(p)
    p.add_argument("--missing", type=float, default=None,
                   help="randomly hide this share of cells before solving (ht-rmc only)")
    p.add_argument("--seed", type=int, default=0, help="seed for --missing")
    p.add_argument("--period", type=int, default=None, help="timestamps per day; enables flags.csv")
    p.add_argument("--days", type=int, default=None)
    p.add_argument("--xi", type=float, default=2.0)
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("flag", help="apply the mean +/- xi*std daily flag rule")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--xi", type=float, default=2.0)
    p.add_argument("--out", type=Path, default=None, help="output CSV (default: standard output)")

    p = sub.add_parser("eval", help="MAE/RMSE of an estimated sparse matrix")
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--estimate", type=Path, required=True)
    p.add_argument("--mask", type=Path, default=None,
                   help="CSV whose blank cells are excluded from the errors")
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("bench", help="rerun the synthetic benchmark over several seeds")
    p.add_argument("--paper-synthetic", action="store_true",
                   help="use the published synthetic setup (the default; kept for explicitness)")
    p.add_argument("--n", type=int, default=PAPER_SYNTH.n, help="series count (smaller for quick runs)")
    p.add_argument("--t", type=int, default=PAPER_SYNTH.t)
    p.add_argument("--seeds", type=int, default=5, help="number of seeds, starting at --seed-start")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--rpca-gamma", type=float, default=bench.RPCA_CONFIG.gamma)
    p.add_argument("--ht-gamma", type=float, default=bench.HT_RPCA_CONFIG.gamma)
    p.add_argument("--tau", type=int, default=bench.HT_RPCA_CONFIG.tau)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--missing-ratios", type=_ratio_list, default=None,
                   help="comma list; runs the HT-RMC missing-data sweep instead")
    p.add_argument("--json", type=Path, default=None, help="write per-run records here")
    return parser


def _solver_config(args, n: int, t: int) -> SolverConfig:
    tau = args.tau
    if args.solver == "rpca":
        tau = 1
    elif tau is None:
        raise UsageError(f"--tau is required for --solver {args.solver}")
    gamma = args.gamma if args.gamma is not None else default_gamma(n, t)
    return SolverConfig(
        tau=tau, gamma=gamma, rho0=args.rho0, rho_max=args.rho_max, beta=args.beta,
        tol=args.tol, max_iter=args.max_iter, n_jobs=args.jobs,
    )


def run_report(solver: str, cfg: SolverConfig, result, wall_ms: int) -> "OrderedDict[str, object]":
    s = result.sparse
    return OrderedDict(
        solver=solver,
        tau=None if solver == "rpca" else cfg.tau,
        gamma=cfg.gamma,
        rho0=cfg.rho0,
        beta=cfg.beta,
        rho_max=cfg.rho_max,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        iterations=result.iterations,
        converged=result.converged,
        final_residual=result.final_residual,
        tnn_final=result.tnn,
        sparse_nonzero_ratio=float(np.count_nonzero(np.abs(s) > NONZERO_EPS) / s.size),
        wall_time_ms=wall_ms,
        residual_history=list(result.residual_history),
    )


def _write_flags(path, flags) -> None:
    path.write_text(format_matrix_csv(flags.astype(int)), encoding="utf-8")


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        n=args.n, t=args.t, r=args.rank, sigma_u=args.sigma_u, sigma_s=args.sigma_s,
        sigma_noise=args.sigma_noise, anomaly_ratio=args.anomaly_ratio, seed=args.seed,
    )
    data = gen_synthetic(cfg)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "corrupted.csv", data.corrupted)
    write_matrix_csv(out / "low_rank.csv", data.low_rank)
    write_matrix_csv(out / "sparse.csv", data.sparse)
    (out / "anomaly_index.csv").write_text(
        "".join(f"{i},{j}\n" for i, j in data.anomaly_index), encoding="utf-8"
    )
    if args.missing_ratio > 0:
        mask = gen_mask(cfg.n, cfg.t, args.missing_ratio, args.seed + 1000)
        write_matrix_csv(out / "observed.csv", data.corrupted, mask)
    log.info("wrote synthetic dataset (%d x %d) to %s", cfg.n, cfg.t, out)
    return 0


def _cmd_detect(args) -> int:
    z, mask = parse_matrix_csv(args.input, header=args.header)
    n, t = z.shape
    if args.missing is not None:
        if args.solver != "ht-rmc":
            raise UsageError("--missing requires --solver ht-rmc")
        mask &= gen_mask(n, t, args.missing, args.seed)
    if not mask.all() and args.solver != "ht-rmc":
        raise UsageError(
            f"input has {int((~mask).sum())} missing cells; only --solver ht-rmc handles missing data"
        )
    if (args.period is None) != (args.days is None):
        raise UsageError("--period and --days must be given together")
    cfg = _solver_config(args, n, t)

    started = time.perf_counter()
    if args.solver == "rpca":
        result = rpca(z, cfg)
    elif args.solver == "ht-rpca":
        result = ht_rpca(z, cfg)
    else:
        result = ht_rmc(z, mask, cfg)
    wall_ms = int(round((time.perf_counter() - started) * 1000))

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "L.csv", result.low_rank)
    write_matrix_csv(out / "S.csv", result.sparse)
    if args.solver == "ht-rmc":
        write_matrix_csv(out / "M.csv", result.completed)
    if args.period is not None:
        flags = flag_anomalies(result.completed, FlagParams(args.period, args.days, args.xi))
        _write_flags(out / "flags.csv", flags)
    report = run_report(args.solver, cfg, result, wall_ms)
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if not result.converged:
        log.warning("%s did not converge in %d iterations (residual %.3e)",
                    args.solver, result.iterations, result.final_residual)
    return 0


def _cmd_flag(args) -> int:
    m, mask = parse_matrix_csv(args.input, header=args.header)
    if not mask.all():
        raise UsageError("flag rule needs a fully observed matrix")
    flags = flag_anomalies(m, FlagParams(args.period, args.days, args.xi))
    if args.out is None:
        sys.stdout.write(format_matrix_csv(flags.astype(int)))
    else:
        _write_flags(args.out, flags)
    return 0


def _cmd_eval(args) -> int:
    truth, _ = parse_matrix_csv(args.truth, header=args.header)
    est, _ = parse_matrix_csv(args.estimate, header=args.header)
    mask = None
    if args.mask is not None:
        _, mask = parse_matrix_csv(args.mask, header=args.header)
    rep = masked_errors(truth, est, mask)
    text = json.dumps(OrderedDict(mae=rep.mae, rmse=rep.rmse, observed_count=rep.observed_count))
    if args.out is None:
        print(text)
    else:
        args.out.write_text(text + "\n", encoding="utf-8")
    return 0


def _cmd_bench(args) -> int:
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    synth = replace(PAPER_SYNTH, n=args.n, t=args.t)

    def progress(rec):
        print(f"{rec.solver:<8} seed={rec.seed} missing={rec.missing_ratio:.2f} "
              f"rmse={rec.rmse:.4f} mae={rec.mae:.4f} iters={rec.iterations} "
              f"({rec.seconds:.1f}s)", file=sys.stderr)

    ht_cfg = SolverConfig(tau=args.tau, gamma=args.ht_gamma, rho0=5e-5, beta=1.1, tol=1e-5,
                          max_iter=args.max_iter, n_jobs=args.jobs)
    if args.missing_ratios:
        records = bench.missing_sweep(args.missing_ratios, seeds, synth=synth, cfg=ht_cfg,
                                      progress=progress)
    else:
        rp_cfg = SolverConfig(tau=1, gamma=args.rpca_gamma, rho0=5e-5, beta=1.1, tol=1e-5,
                              max_iter=args.max_iter)
        records = bench.table1(seeds, synth=synth, ht_cfg=ht_cfg, rpca_cfg=rp_cfg,
                               progress=progress)
    print(bench.format_table(bench.summarize(records)))
    if args.json is not None:
        args.json.write_text(json.dumps([r.__dict__ for r in records], indent=2) + "\n",
                             encoding="utf-8")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "detect": _cmd_detect,
    "flag": _cmd_flag,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def run_pipeline(args: argparse.Namespace) -> int:
    """Dispatch a parsed command; returns the process exit status."""
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, CsvFormatError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"hankel-rpca {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return run_pipeline(args)


if __name__ == "__main__":
    sys.exit(main())
