import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opbo import optimizer
from opbo.benchfn import ObjectiveFunction
from opbo.errors import TooManyPoints
from opbo.mlp import TrainConfig
from opbo.optimizer import (
    RunConfig,
    TrustRegionState,
    run,
    run_opbo,
    run_random_search,
    run_standard_bo,
    run_trust_region,
    update_trust_region,
)

FAST = TrainConfig(epochs=5)


def small(framework, surrogate="op", fn="levy", d=3, **kw):
    kw.setdefault("iterations", 4)
    kw.setdefault("candidate_size", 40)
    kw.setdefault("good_enough_size", 5)
    return RunConfig(ObjectiveFunction(fn, d), framework, surrogate, train=FAST, **kw)


def check_trace_invariants(trace):
    cfg = trace.config
    inc = trace.incumbents
    assert np.all(np.diff(inc) <= 0)
    sizes = [r.suggested_count for r in trace.records]
    assert sizes[0] == cfg.initial_size
    np.testing.assert_array_equal(trace.evals, np.cumsum(sizes))
    for r in trace.records:
        assert np.all(r.suggested >= 0) and np.all(r.suggested <= 1)
    assert trace.best_y == inc[-1]


CONFIGS = [
    ("bo", "gp"), ("opbo", "op"), ("opbo", "gp"), ("opbo", "nn"),
    ("turbo", "op"), ("turbo", "gp"), ("turbo", "nn"), ("random", "op"),
]


@pytest.mark.parametrize("framework,surrogate", CONFIGS)
@pytest.mark.parametrize("fn", ["ackley", "rosenbrock"])
def test_trace_invariants(framework, surrogate, fn):
    check_trace_invariants(run(small(framework, surrogate, fn, seed=3)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["levy", "dixonprice"]), st.sampled_from(CONFIGS))
def test_trace_invariants_property(seed, fn, fs):
    check_trace_invariants(run(small(*fs, fn=fn, d=2, seed=seed, iterations=3)))


def test_budget_arithmetic():
    assert run_standard_bo(small("bo", "gp", iterations=1)).evals[-1] == 11
    trace = run_opbo(small("opbo", good_enough_size=10, iterations=5, candidate_size=30))
    assert trace.evals[-1] == 60
    assert all(r.suggested_count == 10 for r in trace.records[1:])


def test_seeded_determinism():
    for fw, sg in [("bo", "gp"), ("opbo", "op"), ("turbo", "op")]:
        a = run(small(fw, sg, seed=11))
        b = run(small(fw, sg, seed=11))
        assert a.fingerprint() == b.fingerprint()


def test_g1_opbo_matches_standard_bo():
    base = dict(surrogate="gp", iterations=5, candidate_size=60, good_enough_size=1, seed=5)
    bo = run_standard_bo(small("bo", **base))
    ob = run_opbo(small("opbo", **base))
    for rb, ro in zip(bo.records, ob.records):
        assert rb.suggested.tobytes() == ro.suggested.tobytes()
        assert rb.suggested_count == ro.suggested_count


@pytest.mark.parametrize("seed", range(10))
def test_standard_bo_makes_progress_on_levy(seed):
    cfg = RunConfig(ObjectiveFunction("levy", 2), "bo", "gp", iterations=30, candidate_size=200, seed=seed)
    trace = run_standard_bo(cfg)
    assert trace.incumbents[-1] < trace.incumbents[0]


def test_error_carries_iteration():
    cfg = small("bo", "gp", iterations=6, gp_max_points=12)
    with pytest.raises(TooManyPoints) as info:
        run(cfg)
    assert info.value.iteration == 3 + 1
    assert str(info.value).startswith("iteration 4:")


def test_run_config_roundtrip_and_defaults():
    cfg = small("turbo", "gp", seed=2)
    assert cfg.acquisition.kind == "ts"
    assert small("opbo").acquisition.kind == "greedy"
    assert RunConfig(ObjectiveFunction("ackley", 7)).n_candidates == 70
    assert small("bo", "gp", good_enough_size=5).g == 1
    # the echoed form is fully resolved, so it reproduces the same run
    back = RunConfig.from_dict(cfg.to_dict())
    assert back.to_dict() == cfg.to_dict()
    assert run(back).fingerprint() == run(cfg).fingerprint()
    with pytest.raises(ValueError):
        small("opbo", candidate_size=3, good_enough_size=5)


# trust-region state machine

def test_tr_three_successes_double():
    s = TrustRegionState.for_problem(100, 10)
    for incumbent in (10.0, 9.0, 8.0):
        s = update_trust_region(s, incumbent - 0.5, incumbent)
    assert s.side_length == 1.6 and s.success_count == 0


def test_tr_cap_at_max():
    s = TrustRegionState(side_length=1.6, success_count=2)
    assert update_trust_region(s, 0.0, 1.0).side_length == 1.6


def test_tr_failures_halve():
    s = TrustRegionState.for_problem(100, 10)
    assert s.failure_tolerance == 10
    for i in range(9):
        s = update_trust_region(s, 1.0, 1.0)
        assert s.side_length == 0.8 and s.failure_count == i + 1
    s = update_trust_region(s, 1.0, 1.0)
    assert s.side_length == 0.4 and s.failure_count == 0


def test_tr_tie_is_failure_and_tolerance_floor():
    s = update_trust_region(TrustRegionState(), 5.0, 5.0)
    assert s.failure_count == 1 and s.success_count == 0
    assert update_trust_region(TrustRegionState(), 5.0 - 1e-9, 5.0).failure_count == 1
    assert TrustRegionState.for_problem(2, 10).failure_tolerance == 5


def test_tr_restart_trigger():
    s = TrustRegionState(side_length=2**-7 * 1.5, failure_count=4)
    s = update_trust_region(s, 1.0, 1.0)
    assert s.side_length == 0.75 * 2**-7 and s.restart
    r = s.restarted()
    assert r.side_length == 0.8 and not r.restart


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), max_size=80), st.integers(2, 200), st.integers(1, 20))
def test_tr_counter_invariants(outcomes, d, g):
    s = TrustRegionState.for_problem(d, g)
    for ok in outcomes:
        s = update_trust_region(s, 0.0 if ok else 2.0, 1.0)
        assert not (s.success_count and s.failure_count)
        if s.restart:
            assert s.side_length < s.min_side
            s = s.restarted()
        assert s.min_side <= s.side_length <= s.max_side


def test_trust_region_restart_charges_evaluations(monkeypatch):
    tiny = lambda d, g: TrustRegionState(side_length=0.01, initial_side=0.01, failure_tolerance=1)
    monkeypatch.setattr(optimizer.TrustRegionState, "for_problem", staticmethod(tiny))
    real_update = optimizer.update_trust_region
    # every batch scripted as a non-improvement, so each round collapses the region
    monkeypatch.setattr(optimizer, "update_trust_region", lambda st, batch_best, inc: real_update(st, inc, inc))
    cfg = small("turbo", "op", fn="ackley", d=5, iterations=5, seed=1)
    trace = run_trust_region(cfg)
    assert [r.restarted for r in trace.records] == [False] + [True] * 5
    for r in trace.records[1:]:
        assert r.suggested_count == cfg.g + cfg.initial_size
        assert r.trust_region_L == 0.01
    check_trace_invariants(trace)


def test_random_search_budget():
    trace = run_random_search(small("random", iterations=7, good_enough_size=4))
    assert trace.evals[-1] == 10 + 28


@pytest.mark.slow
def test_ackley_desk_opbo_beats_random(desk_finals):
    assert np.median(desk_finals("opbo-op")) < np.median(desk_finals("random"))


@pytest.mark.slow
def test_ackley_desk_trust_region_vs_opbo(desk_finals):
    turbo, opbo = desk_finals("turbo-op"), desk_finals("opbo-op")
    # paired seeds: trust region at least as good in 6 of 10
    assert np.sum(turbo <= opbo) >= 6
