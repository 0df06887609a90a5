"""Desk-scale Ackley comparison at a matched evaluation budget.

OPBO and the trust-region loop spend ``k + R * g`` evaluations; standard
BO gets ``R * g`` single-point iterations and random search draws ``g``
uniform points per iteration, so every algorithm sees the same budget.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..benchfn import ObjectiveFunction
from ..optimizer import RunConfig, run

DESK = {"dim": 100, "initial_size": 10, "iterations": 50, "good_enough_size": 10, "candidate_size": 1000}
ALGORITHMS = {
    "opbo-op": ("opbo", "op"),
    "turbo-op": ("turbo", "op"),
    "bo-gp": ("bo", "gp"),
    "random": ("random", "op"),
}


def desk_config(algorithm: str, seed: int, function: str = "ackley", **overrides) -> RunConfig:
    p = {**DESK, **overrides}
    framework, surrogate = ALGORITHMS[algorithm]
    iterations = p["iterations"]
    if framework == "bo":
        iterations *= p["good_enough_size"]
    return RunConfig(
        objective=ObjectiveFunction(function, p["dim"]),
        framework=framework,
        surrogate=surrogate,
        initial_size=p["initial_size"],
        iterations=iterations,
        candidate_size=p["candidate_size"],
        good_enough_size=p["good_enough_size"],
        seed=seed,
    )


def _final(args) -> tuple[float, int]:
    algorithm, seed, function, overrides = args
    trace = run(desk_config(algorithm, seed, function, **overrides))
    return trace.best_y, int(trace.evals[-1])


def final_incumbents(algorithm: str, seeds, function: str = "ackley", workers: int | None = None,
                     **overrides) -> tuple[np.ndarray, np.ndarray]:
    """Final incumbent and evaluation count per seed, trials run in a process pool."""
    jobs = [(algorithm, int(s), function, overrides) for s in seeds]
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        out = [_final(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            out = list(pool.map(_final, jobs))
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])
