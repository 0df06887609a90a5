"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -v``
or ``-s``) before asserting.
"""

import math
import os
import time

import numpy as np
import pytest

from conftest import DESK_SECONDS
from opbo import optimizer
from opbo import surrogate_op as op
from opbo.acquisition import expected_improvement, select_top_g
from opbo.benchfn import FUNCTION_NAMES, ObjectiveFunction, known_minimum
from opbo.dataset import Dataset
from opbo.harness.config import parse_config
from opbo.harness.diagnose import heldout_rho
from opbo.harness.experiment import TIMING_COLUMNS, run_experiment
from opbo.harness.plots import export_plots
from opbo.harness.summary import summarize
from opbo.metrics import spearman_rho
from opbo.mlp import TrainConfig
from opbo.optimizer import RunConfig, TrustRegionState, run, update_trust_region
from opbo.sampling import latin_hypercube
from opbo.surrogate_gp import PosteriorPrediction
from oracles import fd_pl_gradient, pairwise_rank_rho


def _without_timing(path):
    lines = [line.split(",") for line in path.read_text().splitlines()]
    keep = [i for i, h in enumerate(lines[0]) if h not in TIMING_COLUMNS]
    return [[row[i] for i in keep] for row in lines]


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str, seconds: float, budget: float | None):
        timing = f"{seconds:.1f}s" + (f" (budget {budget:g}s)" if budget else "")
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail} | {timing}")
        assert ok, detail
    return emit


def test_criterion_1_plackett_luce_closed_form(report):
    t0 = time.perf_counter()
    errors = [abs(op.pl_loss(np.full(n, 0.3), np.arange(n)) - math.lgamma(n + 1)) for n in range(1, 11)]
    single = op.pl_loss(np.array([123.4]), np.array([0]))
    dt = time.perf_counter() - t0
    ok = max(errors) <= 1e-9 and single == 0.0 and dt < 1.0
    report(1, "equal scores give ln(n!)", ok, f"max |L - ln n!| = {max(errors):.2e}, n=1 loss = {single!r}", dt, 1)


def test_criterion_2_gradient_matches_finite_differences(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 201))
        s = rng.normal(size=n)
        perm = rng.permutation(n)
        fd = fd_pl_gradient(s, perm, h=1e-5)
        g = op.pl_loss_gradient(s, perm)
        worst = max(worst, float(np.max(np.abs(g - fd) / np.abs(fd))))
    dt = time.perf_counter() - t0
    report(2, "analytic gradient vs central differences", worst < 1e-5 and dt < 10,
           f"max relative error {worst:.2e} over 50 batches", dt, 10)


def test_criterion_3_spearman_exactness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(100):
        u = rng.permutation(10_000)[:100].astype(float)
        v = rng.normal(size=100)
        mismatches += spearman_rho(u, v) != pairwise_rank_rho(list(u), list(v))
    x = rng.normal(size=50)
    ident, rev = spearman_rho(x, x), spearman_rho(x, -x)
    hand = spearman_rho([1, 2, 3], [1, 3, 2])
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and ident == 1.0 and rev == -1.0 and hand == 0.5 and dt < 5
    report(3, "Spearman rho exact", ok,
           f"{mismatches} oracle mismatches, identical={ident}, reversed={rev}, (1,2,3)v(1,3,2)={hand}", dt, 5)


def test_criterion_4_benchmark_minima(report):
    t0 = time.perf_counter()
    worst = 0.0
    for name in FUNCTION_NAMES:
        for d in (2, 10, 100, 1000):
            fn = ObjectiveFunction(name, d)
            x, _ = known_minimum(fn)
            worst = max(worst, abs(float(fn(x))))
    dt = time.perf_counter() - t0
    report(4, "benchmark minima", worst <= 1e-9 and dt < 1, f"max |f(x*)| = {worst:.2e}", dt, 1)


def test_criterion_5_order_only_training(report):
    t0 = time.perf_counter()
    U = latin_hypercube(5, 120, 5).points
    y = np.sum((10 * U - 4) ** 2, axis=1)
    a = op.fit(Dataset(U, y), TrainConfig(), seed=17)
    b = op.fit(Dataset(U, 3 * y + 7), TrainConfig(), seed=17)
    same = np.array(a.loss_trace).tobytes() == np.array(b.loss_trace).tobytes()
    dt = time.perf_counter() - t0
    report(5, "loss traces identical under y -> 3y + 7", same and dt < 30,
           f"{len(a.loss_trace)} epochs, bitwise equal = {same}", dt, 30)


def test_criterion_6_rbf_rank_reproduction(report):
    t0 = time.perf_counter()
    op_rho = np.array([heldout_rho("op", s) for s in range(10)])
    nn_rho = np.array([heldout_rho("nn", s) for s in range(10)])
    dt = time.perf_counter() - t0
    passes = int(np.sum(op_rho >= 0.90))
    ok = passes >= 9 and np.median(nn_rho) < np.median(op_rho) and dt < 300
    report(6, "radial bump held-out rank correlation", ok,
           f"OP rho >= 0.90 in {passes}/10 (median {np.median(op_rho):.4f}); "
           f"NN median {np.median(nn_rho):.4f}", dt, 300)


@pytest.mark.slow
def test_criterion_7_desk_scale_ordering(report, desk_finals):
    opbo = desk_finals("opbo-op")
    rand = desk_finals("random")
    bo = desk_finals("bo-gp")
    dt = sum(DESK_SECONDS.get(a, 0.0) for a in ("opbo-op", "random", "bo-gp"))
    m_op, m_rs, m_bo = (float(np.median(v)) for v in (opbo, rand, bo))
    ordering = m_op < m_rs and m_op < m_bo
    # the wall-clock budget is stated for 4 cores; it is only enforced on such hardware
    cores = os.cpu_count() or 1
    in_budget = dt < 1800 or cores < 4
    report(7, "Ackley d=100 median final incumbent ordering", ordering and in_budget,
           f"OPBO(OP) {m_op:.4f} < random {m_rs:.4f} and < BO(GP) {m_bo:.4f} at 510 evaluations; "
           f"{cores} core(s)", dt, 1800)


def test_criterion_8_trust_region_state_machine(report, monkeypatch):
    t0 = time.perf_counter()
    checks = {}
    s = TrustRegionState.for_problem(100, 10)
    for inc in (3.0, 2.0, 1.0):
        s = update_trust_region(s, inc - 0.1, inc)
    checks["3 successes double 0.8 -> 1.6"] = s.side_length == 1.6
    for inc in (3.0, 2.0, 1.0):
        s = update_trust_region(s, inc - 0.1, inc)
    checks["capped at 1.6"] = s.side_length == 1.6
    s = TrustRegionState.for_problem(100, 10)
    for _ in range(s.failure_tolerance):
        s = update_trust_region(s, 1.0, 1.0)
    checks["failure_tolerance failures halve"] = s.side_length == 0.4
    s = TrustRegionState(side_length=1.5 * 2**-7, failure_tolerance=5, failure_count=4)
    s = update_trust_region(s, 1.0, 1.0)
    checks["L < 2^-7 triggers restart"] = s.restart and s.side_length == 0.75 * 2**-7

    # restart charging inside the loop: every batch is scripted as a non-improvement
    monkeypatch.setattr(optimizer.TrustRegionState, "for_problem", staticmethod(
        lambda d, g: TrustRegionState(side_length=0.01, initial_side=0.01, failure_tolerance=1)))
    real_update = optimizer.update_trust_region
    monkeypatch.setattr(optimizer, "update_trust_region", lambda st, batch_best, inc: real_update(st, inc, inc))
    cfg = RunConfig(ObjectiveFunction("ackley", 4), "turbo", "op", iterations=6, candidate_size=20,
                    good_enough_size=3, train=TrainConfig(epochs=2), seed=0)
    trace = run(cfg)
    restarts = [r for r in trace.records if r.restarted]
    sizes = [r.suggested_count for r in trace.records]
    checks["restart evaluations charged"] = (
        len(restarts) == 6 and all(r.suggested_count == 3 + 10 for r in restarts)
        and list(trace.evals) == list(np.cumsum(sizes))
    )
    dt = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    report(8, "trust-region state machine", not failed and dt < 1,
           "all scripted sequences hold" if not failed else f"failed: {failed}", dt, 1)


def test_criterion_9_invariant_suite(report, tmp_path):
    t0 = time.perf_counter()
    checks = {}
    rng = np.random.default_rng(9)

    mono, acct = True, True
    for fw, sg in [("bo", "gp"), ("opbo", "op"), ("opbo", "nn"), ("turbo", "op"), ("turbo", "gp"), ("random", "op")]:
        for fn in FUNCTION_NAMES:
            cfg = RunConfig(ObjectiveFunction(fn, 4), fw, sg, iterations=4, candidate_size=40,
                            good_enough_size=5, train=TrainConfig(epochs=5), seed=int(rng.integers(1000)))
            trace = run(cfg)
            mono &= bool(np.all(np.diff(trace.incumbents) <= 0))
            acct &= list(trace.evals) == list(np.cumsum([r.suggested_count for r in trace.records]))
    checks["incumbent monotonicity"] = mono
    checks["evaluation accounting"] = acct

    strat = True
    for _ in range(50):
        d, n = int(rng.integers(1, 30)), int(rng.integers(1, 150))
        P = latin_hypercube(d, n, int(rng.integers(2**31))).points
        strat &= all(np.array_equal(np.sort(np.floor(P[:, j] * n)), np.arange(n)) for j in range(d))
    checks["LHS stratification"] = strat

    inv = True
    for _ in range(100):
        v = rng.integers(-500, 500, size=int(rng.integers(1, 80))).astype(float)
        g = int(rng.integers(1, v.size + 1))
        base = select_top_g(v, np.zeros((v.size, 1)), g).indices
        for t in (np.exp(v / 100), v**3 + 5, np.arctan(v / 1000)):
            inv &= np.array_equal(select_top_g(t, np.zeros((v.size, 1)), g).indices, base)
    checks["top-g transform invariance"] = inv

    mu, sd = rng.normal(size=10_000) * 5, np.abs(rng.normal(size=10_000)) * rng.integers(0, 2, 10_000)
    checks["EI non-negative"] = bool(np.all(expected_improvement(PosteriorPrediction(mu, sd), 0.3) >= 0))

    raw = {
        "problems": [{"function": "ackley", "dim": 3}, {"function": "rosenbrock", "dim": 2}],
        "algorithms": [{"framework": "opbo"}, {"framework": "bo", "surrogate": "gp"}, {"framework": "random"}],
        "trials": 2,
        "run": {"iterations": 2, "good_enough_size": 3, "candidate_size": 20, "train": {"epochs": 3}},
    }
    outs = [run_experiment(parse_config(raw), tmp_path / f"p{w}", parallelism=w) for w in (1, 2)]
    same = (outs[0] / "manifest.json").read_bytes() == (outs[1] / "manifest.json").read_bytes()
    for p in sorted((outs[0] / "traces").glob("*.csv")):
        same &= _without_timing(p) == _without_timing(outs[1] / "traces" / p.name)
    sums = [summarize(o) for o in outs]
    same &= sums[0]["rank_table"]["mean_rank"] == sums[1]["rank_table"]["mean_rank"]
    svgs = [[f.read_bytes() for f in export_plots(o)] for o in outs]
    same &= svgs[0] == svgs[1]
    checks["determinism across parallelism 1 vs 2"] = same

    dt = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    report(9, "invariant suite", not failed and dt < 300,
           f"{len(checks) - len(failed)}/{len(checks)} invariants hold" + (f"; failed: {failed}" if failed else ""),
           dt, 300)
