"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL|BLOCKED`` line
(visible even without ``-s``) and then asserts. Criteria 5 and 6 need the
MNIST IDX files, located through ``COLANET_MNIST_DIR`` or ``data/mnist``.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from colanet.config import TUNED_PARAMS, ExperimentConfig
from colanet.data import load_mnist
from colanet.digital import Branch, CountThreshold, DigitalClassifier
from colanet.errors import IngestionError
from colanet.harness import compare, run_experiment
from colanet.plasticity import PlasticityParams, ResourceVector, conserved_update, resource_to_weight, zero_weight_resource
from colanet.snn import EventTrace, build_colanet
from colanet.stats import paired_t_test

from conftest import random_counts, two_pattern_data
from oracle_pseudocode import OracleState

TABLE1_DIGITAL = [98.23, 99.32, 97.36, 95.59, 97.14, 97.11, 96.72, 97.92, 93.12, 93.88]
TABLE1_SPIKING = [97.48, 98.92, 97.37, 96.57, 97.76, 96.13, 98.26, 98.24, 95.14, 92.04]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, blocked=False):
        status = "BLOCKED" if blocked else ("PASS" if ok else "FAIL")
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {status}: {detail}")

    return emit


def random_params(rng, **fixed):
    kw = dict(
        w_min=-float(rng.uniform(0.01, 5)),
        w_max=float(rng.uniform(0.01, 5)),
        d=float(rng.uniform(0.01, 1)),
        n_s=int(rng.integers(0, 5)),
        alpha=float(rng.uniform(0, 0.95)),
    )
    kw.update(fixed)
    return PlasticityParams(**kw)


def test_1_zero_weight_identity(report):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        p = random_params(rng)
        worst = max(worst, abs(resource_to_weight(zero_weight_resource(p), p)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 1.0
    report(1, ok, f"max |w(W0)| = {worst:.2e} over 1000 params (< 1e-12), {elapsed:.3f}s (< 1s)")
    assert ok


def _digital_drift(clf, totals0):
    rows = clf.row_totals()
    return float(np.abs(rows - totals0[: rows.size]).max()) if rows.size else 0.0


def test_2_conservation(report):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst_update = 0.0
    for _ in range(10_000):
        n = int(rng.integers(2, 30))
        p = random_params(rng)
        state = ResourceVector(rng.uniform(-5, 10, n), float(rng.uniform(-5, 10)))
        k = int(rng.integers(1, n + (1 if p.n_s else 0)))
        idx = rng.choice(n, k, replace=False)
        new = conserved_update(state, {int(i): float(rng.normal()) for i in idx}, p)
        worst_update = max(worst_update, abs(new.total(p.n_s) - state.total(p.n_s)))

    # full digital runs: uniform mode on any data, literal mode on counts != 1
    worst_digital = 0.0
    for trial in range(40):
        n = int(rng.integers(4, 30))
        p = random_params(rng)
        literal = trial % 2 == 1
        clf = DigitalClassifier(n, p, CountThreshold.LITERAL if literal else CountThreshold.UNIFORM_GT0)
        created = []
        for _ in range(150):
            x = random_counts(rng, n, 6)
            if literal:
                x[x == 1] = 2
            before = clf.N
            clf.train_step(x, bool(rng.random() < 0.5))
            if clf.N > before:
                created.append((n + p.n_s) * p.W0)
            worst_digital = max(worst_digital, _digital_drift(clf, np.array(created)))

    # full SNN runs
    worst_snn = 0.0
    for trial in range(6):
        n = 16
        p = PlasticityParams(w_min=-1, w_max=0.5, d=0.05, n_s=trial % 3)
        net = build_colanet(n, 5, p, seed=trial)
        expected = (n + p.n_s) * p.W0
        protos = [random_counts(rng, n, 10) for _ in range(3)]
        for _ in range(60):
            k = int(rng.integers(3))
            net.simulate_example(protos[k], k == 0, True)
            worst_snn = max(worst_snn, float(np.abs(net.column.row_totals(p.n_s) - expected).max()))
    elapsed = time.perf_counter() - start
    ok = max(worst_update, worst_digital, worst_snn) < 1e-9 and elapsed < 10.0
    report(
        2,
        ok,
        f"drift: 10^4 updates {worst_update:.1e}, digital runs {worst_digital:.1e}, "
        f"SNN runs {worst_snn:.1e} (< 1e-9), {elapsed:.1f}s (< 10s)",
    )
    assert ok


def test_3_pseudocode_oracle(report):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    instances = branch_mismatch = 0
    worst = 0.0
    branches = {b: 0 for b in Branch}
    while instances < 10_000:
        n = int(rng.integers(2, 7))
        p = random_params(rng, d=float(rng.uniform(0.05, 1.5)))
        gt = int(rng.integers(2))
        clf = DigitalClassifier(n, p, CountThreshold.LITERAL if gt else CountThreshold.UNIFORM_GT0)
        oracle = OracleState(n, p.w_min, p.w_max, p.d, p.n_s, p.alpha, gt=gt)
        for _ in range(12):
            if clf.N > 3:
                break
            x = random_counts(rng, n, 5)
            target = bool(rng.random() < 0.6)
            got = clf.train_step(x, target)
            want = oracle.step([int(v) for v in x], target)
            instances += 1
            branches[got] += 1
            if got.value != want:
                branch_mismatch += 1
                break
            if clf.N:
                worst = max(worst, float(np.abs(clf.W - np.array(oracle.W).reshape(clf.N, n)).max()))
    elapsed = time.perf_counter() - start
    ok = branch_mismatch == 0 and worst <= 1e-12 and elapsed < 30.0
    seen = ", ".join(f"{b.value} {c}" for b, c in branches.items())
    report(
        3,
        ok,
        f"{instances} steps, {branch_mismatch} branch mismatches, max resource diff {worst:.1e} "
        f"(<= 1e-12), {elapsed:.1f}s (< 30s); branches: {seen}",
    )
    assert ok


def test_4_ttest_reproduction(report):
    start = time.perf_counter()
    r = paired_t_test(np.subtract(TABLE1_DIGITAL, TABLE1_SPIKING))
    elapsed = time.perf_counter() - start
    ok = (
        abs(r.mean + 0.15) <= 0.01
        and abs(r.sd - 1.19) <= 0.01
        and abs(r.p - 0.70) <= 0.02
        and r.df == 9
        and elapsed < 1.0
    )
    report(4, ok, f"mean {r.mean:.3f}, sd {r.sd:.3f}, t({r.df}) = {r.t:.3f}, p {r.p:.3f}")
    assert ok


def _mnist(report, n):
    root = Path(os.environ.get("COLANET_MNIST_DIR", Path(__file__).resolve().parents[1] / "data" / "mnist"))
    try:
        return load_mnist(root, "train"), load_mnist(root, "test")
    except IngestionError as exc:
        report(n, False, f"MNIST IDX files not found ({exc}); set COLANET_MNIST_DIR", blocked=True)
        pytest.skip(f"MNIST unavailable: {exc}")


DESK = ExperimentConfig(subsample=(6000, 1000))


def test_5_mnist_digital(report):
    train, test = _mnist(report, 5)
    start = time.perf_counter()
    results = run_experiment(DESK.with_(engine="digital"), train, test)
    elapsed = time.perf_counter() - start
    accs = [r.accuracy for r in results]
    gaps = np.abs(np.subtract(accs, TABLE1_DIGITAL))
    # the other count-threshold reading is reported alongside, not judged
    alt = run_experiment(DESK.with_(engine="digital", count_threshold="uniform_gt0"), train, test)
    alt_gap = np.abs(np.subtract([r.accuracy for r in alt], TABLE1_DIGITAL)).max()
    ok = bool(gaps.max() <= 3.0) and elapsed < 300
    report(
        5,
        ok,
        "per-task accuracy " + " ".join(f"{a:.2f}" for a in accs)
        + f"; max |gap to table| {gaps.max():.2f} (<= 3.0), {elapsed:.0f}s (< 300s); "
        + f"uniform_gt0 mode max gap {alt_gap:.2f}",
    )
    assert ok


def test_6_engine_agreement(report):
    train, test = _mnist(report, 6)
    start = time.perf_counter()
    rep = compare(run_experiment(DESK.with_(engine="both"), train, test))
    elapsed = time.perf_counter() - start
    gaps = np.abs(rep.diffs)
    ok = bool(gaps.max() <= 3.0) and rep.ttest.p >= 0.05 and elapsed < 1800
    report(
        6,
        ok,
        f"max |digital - SNN mean| {gaps.max():.2f} (<= 3.0), paired t-test p {rep.ttest.p:.3f} "
        f"(>= 0.05), {elapsed:.0f}s (< 1800s)",
    )
    assert ok


def test_7_snn_narrative(report):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    x = random_counts(rng, 64, 10)

    silent = build_colanet(64, 16, TUNED_PARAMS, seed=7)
    silent.trace = EventTrace()
    for _ in range(3):
        silent.simulate_example(x, False, True)
    no_label_quiet = not silent.trace.events

    net = build_colanet(64, 16, TUNED_PARAMS, seed=7)
    net.trace = tr = EventTrace()
    net.simulate_example(x, True, True)
    last_silence_tick = net.schedule.total_ticks
    forced = [t for t, n, e in tr.events if n.startswith("L") and e == "forced_fire"]
    wta = [t for t, n, e in tr.events if n.startswith("WTA") and e == "fire"]
    dopamine = [t for t, n, e in tr.events if e == "dopamine"]
    first = min(forced) if forced else None
    one_winner = bool(wta) and len(wta) == len(set(wta))
    dopamine_ok = first is not None and any(0 <= t - first <= TUNED_PARAMS.T_P for t in dopamine)
    elapsed = time.perf_counter() - start
    ok = (
        no_label_quiet
        and first is not None
        and abs(first - last_silence_tick) <= 1
        and one_winner
        and dopamine_ok
        and elapsed < 1.0
    )
    report(
        7,
        ok,
        f"no-label events {len(silent.trace.events)}; first forced L firing at tick {first} "
        f"(last silence tick {last_silence_tick}, {len(forced)} L fired together); WTA firings at ticks "
        f"{wta}; dopamine at {dopamine}; {elapsed:.2f}s (< 1s)",
    )
    assert ok


def test_8_synthetic_separability(report):
    start = time.perf_counter()
    data, a, b = two_pattern_data()
    params = TUNED_PARAMS.with_(d=0.05)
    rng = np.random.default_rng(8)
    # held-out set: both prototypes plus non-target variants
    test = [(a, True), (b, False)]
    for _ in range(20):
        x = np.zeros_like(b)
        support = rng.choice(np.flatnonzero(b), int(rng.integers(3, 11)), replace=False)
        x[support] = rng.integers(1, 11, support.size)
        test.append((x, False))

    dig = DigitalClassifier(a.size, params)
    snn = build_colanet(a.size, 16, params, seed=1)
    reached = {"digital": None, "snn": None}
    train_set = [(a, True), (b, False)]
    for k, (x, y) in enumerate(data[:50], 1):
        dig.train_step(x, y)
        snn.fit([(x, y)])
        for name, eng in (("digital", dig), ("snn", snn)):
            if reached[name] is None and all(eng.predict(v) == t for v, t in train_set):
                reached[name] = k
    dp = np.array([dig.predict(x) for x, _ in test])
    sp = np.array([snn.predict(x) for x, _ in test])
    agree = float((dp == sp).mean())
    elapsed = time.perf_counter() - start
    ok = None not in reached.values() and agree == 1.0 and elapsed < 5.0
    report(
        8,
        ok,
        f"100% train accuracy after {reached['digital']} (digital) / {reached['snn']} (SNN) presentations "
        f"(<= 50); test agreement {100 * agree:.0f}% on {len(test)} examples; {elapsed:.2f}s (< 5s)",
    )
    assert ok
