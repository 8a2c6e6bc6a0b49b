"""One-vs-rest experiment runner for both engines."""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from colanet.config import ExperimentConfig, format_config
from colanet.data import BinaryTask, Dataset, encode_dataset, load_mnist, make_binary_tasks
from colanet.digital import DigitalClassifier
from colanet.errors import ColanetError, ConfigurationError
from colanet.snn import SimSchedule, build_colanet
from colanet.stats import TTestResult, paired_t_test

log = logging.getLogger(__name__)

RUNS_HEADER = ["task", "engine", "seed", "accuracy", "tp", "fp", "tn", "fn"]
COMPARISON_HEADER = ["task", "digital_accuracy", "snn_mean_accuracy", "diff"]


@dataclass(frozen=True)
class RunResult:
    task: int
    engine: str
    seed: Optional[int]
    tp: int
    fp: int
    tn: int
    fn: int
    seconds: float = field(default=0.0, compare=False)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return 100.0 * (self.tp + self.tn) / self.total

    @classmethod
    def from_predictions(cls, task, engine, seed, predicted, actual, seconds=0.0) -> "RunResult":
        predicted = np.asarray(predicted, dtype=bool)
        actual = np.asarray(actual, dtype=bool)
        return cls(
            task,
            engine,
            seed,
            int((predicted & actual).sum()),
            int((predicted & ~actual).sum()),
            int((~predicted & ~actual).sum()),
            int((~predicted & actual).sum()),
            seconds,
        )


@dataclass(frozen=True)
class ComparisonReport:
    tasks: tuple[int, ...]
    digital: tuple[float, ...]
    snn_mean: tuple[float, ...]
    ttest: Optional[TTestResult]

    @property
    def diffs(self) -> tuple[float, ...]:
        return tuple(d - s for d, s in zip(self.digital, self.snn_mean))

    @property
    def degrees_of_freedom(self) -> Optional[int]:
        return None if self.ttest is None else self.ttest.df


def compare(results: Sequence[RunResult]) -> ComparisonReport:
    """Pair each task's digital accuracy with its mean SNN accuracy and test
    the differences (digital minus SNN)."""
    digital = {r.task: r.accuracy for r in results if r.engine == "digital"}
    snn: dict[int, list[float]] = {}
    for r in results:
        if r.engine == "snn":
            snn.setdefault(r.task, []).append(r.accuracy)
    tasks = tuple(sorted(set(digital) & set(snn)))
    d = tuple(digital[t] for t in tasks)
    s = tuple(float(np.mean(snn[t])) for t in tasks)
    test = paired_t_test(np.subtract(d, s)) if len(tasks) >= 2 else None
    return ComparisonReport(tasks, d, s, test)


# -- single runs ---------------------------------------------------------------


def run_digital(task: BinaryTask, cfg: ExperimentConfig) -> RunResult:
    start = time.perf_counter()
    clf = DigitalClassifier(task.train_counts.shape[1], cfg.params, cfg.count_threshold)
    clf.fit(task.train, cfg.epochs)
    pred = clf.predict_many(task.test_counts)
    res = RunResult.from_predictions(
        task.target_digit, "digital", None, pred, task.test_labels, time.perf_counter() - start
    )
    log.info("digital task %d: %.2f%% (N=%d, %.1fs)", task.target_digit, res.accuracy, clf.N, res.seconds)
    return res


def run_snn(task: BinaryTask, cfg: ExperimentConfig, seed: int) -> RunResult:
    start = time.perf_counter()
    net = build_colanet(
        task.train_counts.shape[1],
        cfg.microcolumns,
        cfg.params,
        seed,
        SimSchedule(cfg.presentation_ticks, cfg.silence_ticks),
    )
    net.fit(task.train, cfg.epochs)
    pred = net.predict_many(task.test_counts)
    res = RunResult.from_predictions(
        task.target_digit, "snn", seed, pred, task.test_labels, time.perf_counter() - start
    )
    log.info("snn task %d seed %d: %.2f%% (%.1fs)", task.target_digit, seed, res.accuracy, res.seconds)
    return res


def _run_job(job):
    kind, task, cfg, seed = job
    if kind == "digital":
        return run_digital(task, cfg)
    return run_snn(task, cfg, seed)


# -- orchestration -------------------------------------------------------------


def prepare_tasks(cfg: ExperimentConfig, train: Dataset, test: Dataset) -> list[BinaryTask]:
    if cfg.subsample is not None:
        train, test = train.subset(cfg.subsample[0]), test.subset(cfg.subsample[1])
    return make_binary_tasks(
        encode_dataset(train, cfg.s_max),
        train.labels,
        encode_dataset(test, cfg.s_max),
        test.labels,
        cfg.digits,
    )


def run_experiment(
    cfg: ExperimentConfig, train: Dataset | None = None, test: Dataset | None = None
) -> list[RunResult]:
    """Train and evaluate the configured engine(s) on every one-vs-rest task.

    Datasets default to the MNIST files under ``cfg.data_dir``. Results are
    sorted by (task, engine, seed), so the output does not depend on the
    worker count. If a job fails, finished results are written to
    ``cfg.out_dir`` (when set) before the error propagates.
    """
    if train is None or test is None:
        if cfg.data_dir is None:
            raise ConfigurationError("no datasets given and no data_dir configured")
        train, test = load_mnist(cfg.data_dir, "train"), load_mnist(cfg.data_dir, "test")
    tasks = prepare_tasks(cfg, train, test)
    jobs = []
    for task in tasks:
        if cfg.engine in ("digital", "both"):
            jobs.append(("digital", task, cfg, None))
        if cfg.engine in ("snn", "both"):
            jobs.extend(("snn", task, cfg, seed) for seed in cfg.seeds)

    results: list[RunResult] = []
    try:
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                for res in pool.map(_run_job, jobs):
                    results.append(res)
        else:
            for job in jobs:
                results.append(_run_job(job))
    except ColanetError:
        if results and cfg.out_dir is not None:
            write_runs_csv(sorted(results, key=_order), Path(cfg.out_dir) / "runs.partial.csv")
        raise
    return sorted(results, key=_order)


def _order(r: RunResult):
    return (r.task, r.engine, -1 if r.seed is None else r.seed)


# -- reporting -----------------------------------------------------------------


def write_runs_csv(results: Sequence[RunResult], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_HEADER)
        for r in results:
            writer.writerow(
                [r.task, r.engine, "" if r.seed is None else r.seed, f"{r.accuracy:.2f}", r.tp, r.fp, r.tn, r.fn]
            )


def read_runs_csv(path) -> list[RunResult]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        RunResult(
            int(r["task"]),
            r["engine"],
            int(r["seed"]) if r["seed"] else None,
            int(r["tp"]),
            int(r["fp"]),
            int(r["tn"]),
            int(r["fn"]),
        )
        for r in rows
    ]


def write_comparison_csv(report: ComparisonReport, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_HEADER)
        for t, d, s, diff in zip(report.tasks, report.digital, report.snn_mean, report.diffs):
            writer.writerow([t, f"{d:.4f}", f"{s:.4f}", f"{diff:.4f}"])


def read_comparison_csv(path) -> ComparisonReport:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    tasks = tuple(int(r["task"]) for r in rows)
    d = tuple(float(r["digital_accuracy"]) for r in rows)
    s = tuple(float(r["snn_mean_accuracy"]) for r in rows)
    test = paired_t_test(np.subtract(d, s)) if len(rows) >= 2 else None
    return ComparisonReport(tasks, d, s, test)


def summary_text(results: Sequence[RunResult], report: ComparisonReport) -> str:
    lines = []
    for engine in ("digital", "snn"):
        accs = [r.accuracy for r in results if r.engine == engine]
        if accs:
            lines.append(f"{engine}: {len(accs)} runs, mean accuracy {np.mean(accs):.2f}%")
    if report.ttest is not None:
        tt = report.ttest
        lines.append(
            f"paired t-test (digital - snn): mean {tt.mean:.3f}, sd {tt.sd:.3f}, "
            f"t({tt.df}) = {tt.t:.3f}, p = {tt.p:.3f}"
        )
    else:
        lines.append("paired t-test: not available (needs both engines on >= 2 tasks)")
    return "\n".join(lines) + "\n"


def emit_report(results: Sequence[RunResult], report: ComparisonReport | None, out_dir, cfg=None) -> dict:
    """Write ``runs.csv``, ``comparison.csv`` and ``summary.txt`` to ``out_dir``."""
    if not results:
        raise ValueError("no results to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = report if report is not None else compare(results)
    paths = {"runs": out / "runs.csv", "comparison": out / "comparison.csv", "summary": out / "summary.txt"}
    write_runs_csv(results, paths["runs"])
    write_comparison_csv(report, paths["comparison"])
    paths["summary"].write_text(summary_text(results, report), encoding="utf-8")
    if cfg is not None:
        paths["config"] = out / "config.used"
        paths["config"].write_text(format_config(cfg), encoding="utf-8")
    return paths
