"""Command-line front end.

Subcommands: ``simulate`` (Monte Carlo rejection rates), ``test`` (one
independence test of two sample CSVs), ``cidr`` (price CSV to CIDR curve
file), ``pairwise`` (all-pairs p-value matrix from price CSVs).

Reports embed the fully resolved configuration and seed and contain no
timestamps, so re-running a command reproduces its output byte for byte.
Output files are written atomically (write-then-rename).

Exit codes: 0 success, 2 usage/parameter error, 3 data error,
4 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .cidr import build_cidr_sample, pairwise_matrix, parse_price_csv
from .errors import (
    AlignmentError,
    DegenerateVariance,
    FtsError,
    GridMismatch,
    InvalidGrid,
    InvalidHorizon,
    InvalidPrice,
    LengthMismatch,
    NonStationaryKernel,
    ParseError,
)
from .functional import load_sample_csv, make_uniform_grid, sample_csv_text
from .simulate import DgpSpec, mc_report_csv, mc_report_json_dict, run_monte_carlo
from .statistic import KernelSpec, TestConfig, independence_test

USAGE_EXIT = 2
DATA_EXIT = 3
DEGENERATE_EXIT = 4

_KERNEL_ALIASES = {
    "bartlett": "bartlett",
    "parzen": "parzen",
    "flat-top": "flat_top",
    "flat_top": "flat_top",
    "flattop": "flat_top",
}


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _kernel(name: str, window: float | None) -> KernelSpec:
    family = _KERNEL_ALIASES.get(name.lower())
    if family is None:
        raise ValueError(f"unknown kernel {name!r}; choose bartlett, parzen or flat-top")
    return KernelSpec(family, window)


def _config(args) -> TestConfig:
    return TestConfig(
        H=args.H,
        kernel_mu=_kernel(args.kernel1, args.w1),
        kernel_sigma=_kernel(args.kernel2, args.w2),
    )


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("FTS_THREADS")
    return max(1, int(env)) if env else 1


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_simulate(args) -> int:
    if args.n < 2:
        raise ValueError("--n must be at least 2")
    if args.reps < 1:
        raise ValueError("--reps must be at least 1")
    family = {"iid": "iid_bm", "iid_bm": "iid_bm", "far1": "far1"}.get(args.dgp)
    if family is None:
        raise ValueError(f"unknown DGP {args.dgp!r}")
    grid = make_uniform_grid(args.m)
    spec = DgpSpec(
        family=family, n=args.n, grid=grid, seed=args.seed, q=args.q, burn_in=args.burn_in
    )
    tick = max(1, args.reps // 20)

    def progress(done: int, total: int) -> None:
        if done % tick == 0 or done == total:
            sys.stderr.write(f"\r{done}/{total} replications")
            if done == total:
                sys.stderr.write("\n")
            sys.stderr.flush()

    report = run_monte_carlo(
        spec, spec, args.reps, _config(args), threads=_threads(args),
        progress=progress if args.reps >= 50 and sys.stderr.isatty() else None,
    )
    if args.format == "csv":
        _emit(mc_report_csv(report), args.out)
    else:
        _emit(_json_text(mc_report_json_dict(report)), args.out)
    return 0


def cmd_test(args) -> int:
    x = load_sample_csv(args.x)
    y = load_sample_csv(args.y)
    if x.n != y.n or x.m != y.m or not x.grid.same_as(y.grid):
        raise AlignmentError(
            f"samples disagree in shape or grid: {args.x} is {x.n}x{x.m}, "
            f"{args.y} is {y.n}x{y.m}"
        )
    result = independence_test(x, y, _config(args))
    if args.format == "csv":
        text = result.to_csv_line(header=True) + "\n" + result.to_csv_line() + "\n"
    else:
        payload = result.to_json_dict()
        payload["inputs"] = {"x": str(args.x), "y": str(args.y)}
        text = _json_text(payload)
    _emit(text, args.out)
    summary = f"V={result.v_stat:.6g} p={result.p_value:.6g}\n"
    (sys.stdout if args.out else sys.stderr).write(summary)
    return 0


def cmd_cidr(args) -> int:
    panel = parse_price_csv(args.prices, ticker=args.ticker, window=args.window)
    cidr = build_cidr_sample(panel, make_uniform_grid(args.m))
    if cidr.skipped_days:
        sys.stderr.write(f"skipped {cidr.skipped_days} day(s) with < 2 observations\n")
    if args.format == "json":
        payload = {
            "ticker": cidr.ticker,
            "skipped_days": cidr.skipped_days,
            "grid": list(cidr.sample.grid.points),
            "values": [list(row) for row in cidr.sample.values],
            "config": {"m": args.m, "window": args.window},
        }
        _emit(_json_text(payload), args.out)
    else:
        _emit(sample_csv_text(cidr.sample), args.out)
    return 0


def cmd_pairwise(args) -> int:
    samples = []
    grid = make_uniform_grid(args.m)
    for path in args.prices:
        panel = parse_price_csv(path, ticker=Path(path).stem, window=args.window)
        samples.append(build_cidr_sample(panel, grid))
    report = pairwise_matrix(samples, _config(args), threads=_threads(args))
    if args.format == "csv":
        _emit(report.matrix_csv(), args.out)
    else:
        _emit(_json_text(report.to_json_dict()), args.out)
    if args.matrix_csv:
        _write_atomic(args.matrix_csv, report.matrix_csv())
    return 0


def _add_kernel_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--H", type=int, default=None, help="lag horizon (default floor(n^(1/4)))")
    p.add_argument("--kernel1", default="bartlett", help="centering kernel family")
    p.add_argument("--kernel2", default="bartlett", help="scale kernel family")
    p.add_argument("--w1", type=float, default=None, help="centering window (default floor(n^(1/4)))")
    p.add_argument("--w2", type=float, default=None, help="scale window (default floor(H^(1/4)))")


def _add_common_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: FTS_THREADS env var or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftsindep",
        description="Independence testing between two functional time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo rejection-rate study")
    p.add_argument("--dgp", default="iid", help="iid or far1")
    p.add_argument("--q", type=float, default=0.0, help="FAR(1) kernel strength")
    p.add_argument("--n", type=int, default=300, help="curves per sample")
    p.add_argument("--m", type=int, default=100, help="grid points per curve")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=100, dest="burn_in")
    _add_kernel_options(p)
    _add_common_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test", help="test two sample CSV files for independence")
    p.add_argument("--x", required=True, help="first sample CSV")
    p.add_argument("--y", required=True, help="second sample CSV")
    _add_kernel_options(p)
    _add_common_output(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("cidr", help="build CIDR curves from a date,time,price CSV")
    p.add_argument("--prices", required=True)
    p.add_argument("--ticker", default=None)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--window", choices=("per-day", "fixed"), default="per-day")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cidr)

    p = sub.add_parser("pairwise", help="all-pairs independence tests of price CSVs")
    p.add_argument("--prices", nargs="+", required=True)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--window", choices=("per-day", "fixed"), default="per-day")
    p.add_argument("--matrix-csv", default=None, help="also write the p-value matrix CSV here")
    _add_kernel_options(p)
    _add_common_output(p)
    p.set_defaults(func=cmd_pairwise)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "window"):
        args.window = args.window.replace("-", "_")
    try:
        return args.func(args)
    except (NonStationaryKernel, InvalidHorizon, InvalidGrid, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except (ParseError, InvalidPrice, AlignmentError, GridMismatch, LengthMismatch) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DATA_EXIT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DATA_EXIT
    except DegenerateVariance as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DEGENERATE_EXIT
    except FtsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DATA_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
