"""Optimization loops: standard BO, OPBO with a good-enough batch, a single
trust-region variant hosting any surrogate, and a random-search baseline.

All loops share one code path (:func:`_run_loop`) and one labeled RNG
layout, so e.g. OPBO with a GP, Thompson sampling and ``g = 1`` suggests
exactly the same points as standard BO with the same seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import surrogate_nn, surrogate_op
from .acquisition import AcquisitionSpec, acquire, select_top_g
from .benchfn import Evaluator, ObjectiveFunction
from .dataset import Dataset
from .errors import OpboError
from .mlp import TrainConfig
from .rng import substream, subseed
from .sampling import latin_hypercube, random_sampling, sample, trust_region_candidates
from .surrogate_gp import fit_gp

FRAMEWORKS = ("bo", "opbo", "turbo", "random")
SURROGATES = ("op", "gp", "nn")


@dataclass(frozen=True)
class RunConfig:
    objective: ObjectiveFunction
    framework: str = "opbo"
    surrogate: str = "op"
    acquisition: AcquisitionSpec | None = None
    initial_size: int = 10
    iterations: int = 50
    candidate_size: int | None = None
    good_enough_size: int = 10
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    candidate_strategy: str | None = None
    warm_start: bool = False
    gp_max_points: int = 2000

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"unknown framework {self.framework!r}")
        if self.surrogate not in SURROGATES:
            raise ValueError(f"unknown surrogate {self.surrogate!r}")
        if self.acquisition is None:
            kind = "ts" if self.surrogate == "gp" else "greedy"
            object.__setattr__(self, "acquisition", AcquisitionSpec(kind))
        if self.initial_size < 1 or self.iterations < 1:
            raise ValueError("initial_size and iterations must be >= 1")
        if not 1 <= self.g <= self.n_candidates:
            raise ValueError(f"need 1 <= g <= N, got g={self.g}, N={self.n_candidates}")

    @property
    def g(self) -> int:
        return 1 if self.framework == "bo" else self.good_enough_size

    @property
    def n_candidates(self) -> int:
        return self.candidate_size if self.candidate_size is not None else 10 * self.objective.dim

    @property
    def strategy(self) -> str:
        if self.candidate_strategy is not None:
            return self.candidate_strategy
        return "turbo" if self.framework == "turbo" else "lhs"

    @property
    def algorithm_id(self) -> str:
        return "random" if self.framework == "random" else f"{self.framework}-{self.surrogate}"

    def to_dict(self) -> dict:
        return {
            "objective": self.objective.to_dict(),
            "framework": self.framework,
            "surrogate": self.surrogate,
            "acquisition": self.acquisition.to_dict(),
            "initial_size": self.initial_size,
            "iterations": self.iterations,
            "candidate_size": self.n_candidates,
            "good_enough_size": self.g,
            "train": self.train.to_dict(),
            "seed": self.seed,
            "candidate_strategy": self.strategy,
            "warm_start": self.warm_start,
            "gp_max_points": self.gp_max_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["objective"] = ObjectiveFunction(**d["objective"])
        if d.get("acquisition") is not None:
            d["acquisition"] = AcquisitionSpec(**d["acquisition"])
        if d.get("train") is not None:
            d["train"] = TrainConfig(**d["train"])
        return cls(**d)


@dataclass(frozen=True)
class TrustRegionState:
    side_length: float = 0.8
    success_count: int = 0
    failure_count: int = 0
    success_tolerance: int = 3
    failure_tolerance: int = 5
    min_side: float = 2.0**-7
    max_side: float = 1.6
    initial_side: float = 0.8
    restart: bool = False

    @classmethod
    def for_problem(cls, d: int, g: int, **kw) -> "TrustRegionState":
        return cls(failure_tolerance=max(5, math.ceil(d / g)), **kw)

    def restarted(self) -> "TrustRegionState":
        return replace(self, side_length=self.initial_side, success_count=0, failure_count=0, restart=False)


def update_trust_region(state: TrustRegionState, batch_best: float, incumbent: float) -> TrustRegionState:
    """Success iff the batch strictly beats the incumbent by a relative 1e-8."""
    if batch_best < incumbent - 1e-8 * abs(incumbent):
        succ, fail = state.success_count + 1, 0
    else:
        succ, fail = 0, state.failure_count + 1
    side = state.side_length
    if succ == state.success_tolerance:
        side, succ = min(2.0 * side, state.max_side), 0
    elif fail == state.failure_tolerance:
        side, fail = side / 2.0, 0
    return replace(state, side_length=side, success_count=succ, failure_count=fail,
                   restart=side < state.min_side)


@dataclass
class IterationRecord:
    iteration: int
    suggested: np.ndarray  # unit-cube rows evaluated this round
    observed: np.ndarray
    batch_best: float
    incumbent: float
    evals_cumulative: int
    fit_seconds: float
    iter_seconds: float
    trust_region_L: float | None = None
    restarted: bool = False
    surrogate_info: dict = field(default_factory=dict)

    @property
    def suggested_count(self) -> int:
        return int(self.observed.shape[0])


@dataclass
class OptimizationTrace:
    config: RunConfig
    records: list[IterationRecord] = field(default_factory=list)
    best_x: np.ndarray | None = None
    best_x_unit: np.ndarray | None = None
    best_y: float = math.inf
    total_runtime: float = 0.0

    @property
    def incumbents(self) -> np.ndarray:
        return np.array([r.incumbent for r in self.records])

    @property
    def evals(self) -> np.ndarray:
        return np.array([r.evals_cumulative for r in self.records])

    def fingerprint(self) -> tuple:
        """Everything except wall-clock timings, for determinism checks."""
        rows = tuple(
            (r.iteration, r.suggested.tobytes(), r.observed.tobytes(), r.batch_best, r.incumbent,
             r.evals_cumulative, r.trust_region_L, r.restarted)
            for r in self.records
        )
        return rows, self.best_y, None if self.best_x is None else self.best_x.tobytes()


def _fit_surrogate(config: RunConfig, data: Dataset, r: int, previous):
    seed = subseed(config.seed, f"fit:{r}")
    if config.surrogate == "gp":
        model = fit_gp(data, learn_noise=config.objective.noise_std > 0, max_points=config.gp_max_points)
        return model, model.hyperparameters()
    train = replace(config.train, seed=seed)
    if config.surrogate == "op":
        if config.warm_start and previous is not None:
            model = surrogate_op.refit_warm(previous, data, train)
        else:
            model = surrogate_op.fit(data, train, seed)
    else:
        model = surrogate_nn.fit_regression(data, train, seed)
    info = {"final_loss": model.loss_trace[-1]} if model.loss_trace else {}
    return model, info


def _candidates(config: RunConfig, r: int, center=None, side=None):
    rng = substream(config.seed, f"candidates:{r}")
    d, n = config.objective.dim, config.n_candidates
    if config.strategy == "turbo":
        return trust_region_candidates(center, side, d, n, rng)
    return sample(config.strategy, d, n, rng)


def _with_iteration(exc: Exception, r: int) -> Exception:
    exc.iteration = r
    if exc.args and isinstance(exc.args[0], str):
        exc.args = (f"iteration {r}: {exc.args[0]}",) + exc.args[1:]
    return exc


def _run_loop(config: RunConfig, trust_region: bool) -> OptimizationTrace:
    fn = config.objective
    d, k, g = fn.dim, config.initial_size, config.g
    evaluator = Evaluator(fn, substream(config.seed, "noise"))
    trace = OptimizationTrace(config)
    start = time.perf_counter()

    X0 = latin_hypercube(d, k, substream(config.seed, "init")).points
    y0 = evaluator.evaluate_batch_unit(X0)
    data = Dataset(X0, y0)
    local = Dataset(X0.copy(), y0.copy())  # trust-region segment since the last restart
    state = TrustRegionState.for_problem(d, g) if trust_region else None
    trace.records.append(IterationRecord(
        0, X0, y0, float(y0.min()), float(y0.min()), evaluator.n_evals, 0.0,
        time.perf_counter() - start, state.side_length if state else None))

    model = None
    for r in range(1, config.iterations + 1):
        t_iter = time.perf_counter()
        try:
            train_data = local if trust_region else data
            t_fit = time.perf_counter()
            model, info = _fit_surrogate(config, train_data, r, model)
            fit_seconds = time.perf_counter() - t_fit

            if trust_region:
                center, local_best = local.best()
                cands = _candidates(config, r, center, state.side_length)
            else:
                cands = _candidates(config, r)
            values = acquire(model, cands, config.acquisition, train_data,
                             substream(config.seed, f"acquisition:{r}"))
            chosen = select_top_g(values, cands, g)
            y = evaluator.evaluate_batch_unit(chosen.points)
        except (OpboError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            raise _with_iteration(exc, r)

        data.append(chosen.points, y)
        suggested, observed = chosen.points, y
        restarted = False
        if trust_region:
            local.append(chosen.points, y)
            state = update_trust_region(state, float(y.min()), local_best)
            if state.restart:
                Xr = latin_hypercube(d, k, substream(config.seed, f"restart:{r}")).points
                yr = evaluator.evaluate_batch_unit(Xr)
                data.append(Xr, yr)
                local = Dataset(Xr, yr)
                state = state.restarted()
                suggested, observed = np.vstack([suggested, Xr]), np.concatenate([y, yr])
                restarted = True
                model = None

        trace.records.append(IterationRecord(
            r, suggested, observed, float(observed.min()), float(data.y.min()), evaluator.n_evals,
            fit_seconds, time.perf_counter() - t_iter, state.side_length if state else None,
            restarted, info))

    _finish(trace, data, start)
    return trace


def _finish(trace: OptimizationTrace, data: Dataset, start: float) -> None:
    best_u, best_y = data.best()
    trace.best_x_unit = best_u
    trace.best_x = trace.config.objective.from_unit(best_u)
    trace.best_y = best_y
    trace.total_runtime = time.perf_counter() - start


def run_standard_bo(config: RunConfig) -> OptimizationTrace:
    if config.framework != "bo":
        config = replace(config, framework="bo")
    return _run_loop(config, trust_region=False)


def run_opbo(config: RunConfig) -> OptimizationTrace:
    if config.framework != "opbo":
        config = replace(config, framework="opbo")
    return _run_loop(config, trust_region=False)


def run_trust_region(config: RunConfig) -> OptimizationTrace:
    if config.framework != "turbo":
        config = replace(config, framework="turbo")
    return _run_loop(config, trust_region=True)


def run_random_search(config: RunConfig) -> OptimizationTrace:
    """Same initial design, then ``g`` uniform points per iteration."""
    fn = config.objective
    d, k, g = fn.dim, config.initial_size, config.g
    evaluator = Evaluator(fn, substream(config.seed, "noise"))
    trace = OptimizationTrace(config)
    start = time.perf_counter()
    X0 = latin_hypercube(d, k, substream(config.seed, "init")).points
    y0 = evaluator.evaluate_batch_unit(X0)
    data = Dataset(X0, y0)
    trace.records.append(IterationRecord(0, X0, y0, float(y0.min()), float(y0.min()), evaluator.n_evals,
                                         0.0, time.perf_counter() - start))
    for r in range(1, config.iterations + 1):
        t_iter = time.perf_counter()
        X = random_sampling(d, g, substream(config.seed, f"candidates:{r}")).points
        y = evaluator.evaluate_batch_unit(X)
        data.append(X, y)
        trace.records.append(IterationRecord(r, X, y, float(y.min()), float(data.y.min()), evaluator.n_evals,
                                             0.0, time.perf_counter() - t_iter))
    _finish(trace, data, start)
    return trace


def run(config: RunConfig) -> OptimizationTrace:
    return {
        "bo": run_standard_bo,
        "opbo": run_opbo,
        "turbo": run_trust_region,
        "random": run_random_search,
    }[config.framework](config)
