"""Command line entry point: ``colanet train | ttest | make-proxy-data``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from colanet.config import ExperimentConfig, load_config
from colanet.errors import ColanetError
from colanet.harness import compare, emit_report, read_comparison_csv, read_runs_csv, run_experiment, summary_text

log = logging.getLogger("colanet")


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected TRAIN_N,TEST_N")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="colanet", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log every finished run")
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train and evaluate on the one-vs-rest tasks")
    tr.add_argument("--engine", choices=("digital", "snn", "both"))
    tr.add_argument("--config", type=Path, help="key = value config file (default: built-in defaults)")
    tr.add_argument("--data-dir", type=Path, help="directory holding the MNIST IDX files")
    tr.add_argument("--proxy", action="store_true", help="use the bundled digits stand-in instead of MNIST")
    tr.add_argument("--out", type=Path, help="report directory")
    tr.add_argument("--subsample", type=_pair, metavar="TRAIN_N,TEST_N")
    tr.add_argument("--seed-list", type=_ints, metavar="S1,S2,...", help="SNN seeds")
    tr.add_argument("--digits", type=_ints, metavar="D1,D2,...")
    tr.add_argument("--count-threshold", choices=("literal", "uniform_gt0"))
    tr.add_argument("--workers", type=int)

    tt = sub.add_parser("ttest", help="paired t-test from a runs.csv or comparison.csv")
    tt.add_argument("csv", type=Path)

    mp = sub.add_parser("make-proxy-data", help="write the digits stand-in as MNIST-named IDX files")
    mp.add_argument("--out", type=Path, required=True)
    mp.add_argument("--shifts", action="store_true", help="add 1-pixel shifted training copies")
    return ap


def _train(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "engine": args.engine,
        "subsample": args.subsample,
        "seeds": args.seed_list,
        "digits": args.digits,
        "count_threshold": args.count_threshold,
        "workers": args.workers,
        "data_dir": None if args.data_dir is None else str(args.data_dir),
        "out_dir": None if args.out is None else str(args.out),
    }
    cfg = cfg.with_(**{k: v for k, v in overrides.items() if v is not None})
    if cfg.out_dir is None:
        raise ColanetError("no output directory: pass --out or set out_dir in the config")
    if args.proxy:
        from colanet.proxy import proxy_digits

        train, test = proxy_digits()
        results = run_experiment(cfg, train, test)
    else:
        results = run_experiment(cfg)
    report = compare(results)
    emit_report(results, report, cfg.out_dir, cfg)
    sys.stdout.write(summary_text(results, report))
    return 0


def _ttest(args) -> int:
    with args.csv.open(encoding="utf-8") as fh:
        header = fh.readline()
    if header.startswith("task,engine"):
        report = compare(read_runs_csv(args.csv))
    else:
        report = read_comparison_csv(args.csv)
    if report.ttest is None:
        raise ColanetError("need paired digital and SNN accuracies for at least 2 tasks")
    tt = report.ttest
    print(f"tasks {len(report.tasks)}  mean {tt.mean:.3f}  sd {tt.sd:.3f}  t({tt.df}) = {tt.t:.3f}  p = {tt.p:.3f}")
    return 0


def _make_proxy(args) -> int:
    from colanet.proxy import write_proxy_idx

    print(write_proxy_idx(args.out, args.shifts))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"train": _train, "ttest": _ttest, "make-proxy-data": _make_proxy}[args.command]
    try:
        return handler(args)
    except (ColanetError, ValueError, OSError) as exc:
        print(f"colanet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
