"""Experiment configuration: JSON schema validation, presets, trial expansion."""

from __future__ import annotations

import copy
import json
import math
import os
import zlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..acquisition import AcquisitionSpec
from ..benchfn import FUNCTION_NAMES, ObjectiveFunction
from ..errors import ConfigInvalid, OpboError
from ..mlp import TrainConfig
from ..optimizer import FRAMEWORKS, SURROGATES, RunConfig

OUTPUT_ROOT_ENV = "OPBO_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "opbo-runs"

# per-algorithm keys that map onto RunConfig fields
_RUN_KEYS = {"initial_size", "iterations", "candidate_size", "good_enough_size", "candidate_strategy",
             "warm_start", "gp_max_points"}

PRESETS: dict[str, dict] = {
    "desk": {
        "name": "desk",
        "problems": [{"function": f, "dim": 100} for f in FUNCTION_NAMES],
        "algorithms": [
            {"framework": "opbo", "surrogate": "op"},
            {"framework": "bo", "surrogate": "gp"},
            {"framework": "random"},
        ],
        "trials": 10,
        "base_seed": 0,
        "run": {"initial_size": 10, "iterations": 50, "good_enough_size": 10},
        "match_evaluations": True,
    },
    "paper": {
        "name": "paper",
        "problems": [{"function": f, "dim": d} for f in FUNCTION_NAMES for d in (600, 700, 800, 900, 1000)],
        "algorithms": [
            {"framework": "turbo", "surrogate": "op"},
            {"framework": "turbo", "surrogate": "gp"},
            {"framework": "turbo", "surrogate": "nn"},
            {"framework": "bo", "surrogate": "gp"},
            {"framework": "opbo", "surrogate": "op"},
        ],
        "trials": 10,
        "base_seed": 0,
        "run": {"initial_size": 10, "iterations": 500, "good_enough_size": 10},
        "match_evaluations": False,
    },
}


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT))


@dataclass(frozen=True)
class ProblemSpec:
    function: str
    dim: int
    lower_bound: float = -5.0
    upper_bound: float = 10.0
    noise_std: float = 0.0

    def objective(self) -> ObjectiveFunction:
        return ObjectiveFunction(self.function, self.dim, self.lower_bound, self.upper_bound, self.noise_std)

    @property
    def problem_id(self) -> str:
        return self.objective().problem_id


@dataclass(frozen=True)
class AlgorithmSpec:
    framework: str
    surrogate: str = "op"
    acquisition: dict | None = None
    overrides: dict = field(default_factory=dict)
    name: str | None = None

    @property
    def algorithm_id(self) -> str:
        if self.name:
            return self.name
        return "random" if self.framework == "random" else f"{self.framework}-{self.surrogate}"


@dataclass(frozen=True)
class TrialSpec:
    trial_id: str
    problem_id: str
    algorithm_id: str
    trial: int
    seed: int
    run_config: dict  # RunConfig.to_dict(), JSON-ready


@dataclass
class ExperimentConfig:
    problems: list[ProblemSpec]
    algorithms: list[AlgorithmSpec]
    trials: int = 10
    base_seed: int = 0
    run: dict = field(default_factory=dict)
    match_evaluations: bool = True
    output_dir: str | None = None
    parallelism: int = 1
    name: str = "experiment"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "problems": [{f.name: getattr(p, f.name) for f in fields(p)} for p in self.problems],
            "algorithms": [
                {"framework": a.framework, "surrogate": a.surrogate, "acquisition": a.acquisition,
                 "name": a.name, **a.overrides}
                for a in self.algorithms
            ],
            "trials": self.trials,
            "base_seed": self.base_seed,
            "run": self.run,
            "match_evaluations": self.match_evaluations,
            "output_dir": self.output_dir,
            "parallelism": self.parallelism,
        }


def cell_seed(base_seed: int, problem_id: str, trial: int) -> int:
    """Seed shared by every algorithm on ``problem_id`` for one trial index."""
    return int(base_seed) + zlib.crc32(problem_id.encode()) % 100_000 + int(trial)


def _require(cond: bool, path: str, reason: str) -> None:
    if not cond:
        raise ConfigInvalid(path, reason)


def _int(d: dict, key: str, path: str, default=None, minimum: int | None = None):
    v = d.get(key, default)
    _require(isinstance(v, int) and not isinstance(v, bool), f"{path}.{key}", "must be an integer")
    if minimum is not None:
        _require(v >= minimum, f"{path}.{key}", f"must be >= {minimum}")
    return v


def parse_config(raw: dict) -> ExperimentConfig:
    _require(isinstance(raw, dict), "$", "config must be a JSON object")
    known = {"name", "problems", "suite", "algorithms", "trials", "base_seed", "run", "match_evaluations",
             "output_dir", "parallelism"}
    for key in raw:
        _require(key in known, f"$.{key}", "unknown field")

    problems: list[ProblemSpec] = []
    if "suite" in raw:
        suite = raw["suite"]
        _require(isinstance(suite, dict), "$.suite", "must be an object with functions and dims")
        for f in suite.get("functions", FUNCTION_NAMES):
            for d in suite.get("dims", []):
                problems.append(ProblemSpec(f, d))
    for i, p in enumerate(raw.get("problems", [])):
        path = f"$.problems[{i}]"
        _require(isinstance(p, dict), path, "must be an object")
        _require("function" in p, f"{path}.function", "required")
        _int(p, "dim", path, minimum=1)
        allowed = {f.name for f in fields(ProblemSpec)}
        for k in p:
            _require(k in allowed, f"{path}.{k}", "unknown field")
        problems.append(ProblemSpec(**p))
    _require(len(problems) > 0, "$.problems", "at least one problem is required")
    for i, p in enumerate(problems):
        try:
            p.objective()
        except (OpboError, ValueError, TypeError) as exc:
            raise ConfigInvalid(f"$.problems[{i}]", str(exc)) from None

    algorithms: list[AlgorithmSpec] = []
    raw_algs = raw.get("algorithms")
    _require(isinstance(raw_algs, list) and raw_algs, "$.algorithms", "must be a non-empty list")
    for i, a in enumerate(raw_algs):
        path = f"$.algorithms[{i}]"
        _require(isinstance(a, dict), path, "must be an object")
        fw = a.get("framework")
        _require(fw in FRAMEWORKS, f"{path}.framework", f"must be one of {FRAMEWORKS}")
        sur = a.get("surrogate", "op")
        _require(sur in SURROGATES, f"{path}.surrogate", f"must be one of {SURROGATES}")
        acq = a.get("acquisition")
        if acq is not None:
            try:
                AcquisitionSpec(**acq)
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"{path}.acquisition", str(exc)) from None
        overrides = {k: v for k, v in a.items() if k not in ("framework", "surrogate", "acquisition", "name")}
        for k in overrides:
            _require(k in _RUN_KEYS or k == "train", f"{path}.{k}", "unknown field")
        algorithms.append(AlgorithmSpec(fw, sur, acq, overrides, a.get("name")))
    ids = [a.algorithm_id for a in algorithms]
    _require(len(set(ids)) == len(ids), "$.algorithms", f"duplicate algorithm ids {ids}; set 'name'")

    run = raw.get("run", {})
    _require(isinstance(run, dict), "$.run", "must be an object")
    for k in run:
        _require(k in _RUN_KEYS or k == "train", f"$.run.{k}", "unknown field")
    if "train" in run:
        try:
            TrainConfig(**run["train"])
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid("$.run.train", str(exc)) from None

    cfg = ExperimentConfig(
        problems=problems,
        algorithms=algorithms,
        trials=_int(raw, "trials", "$", 10, minimum=1),
        base_seed=_int(raw, "base_seed", "$", 0),
        run=copy.deepcopy(run),
        match_evaluations=bool(raw.get("match_evaluations", True)),
        output_dir=raw.get("output_dir"),
        parallelism=_int(raw, "parallelism", "$", 1, minimum=1),
        name=str(raw.get("name", "experiment")),
    )
    # surface RunConfig errors (e.g. g > N) now, with a field path
    for i, problem in enumerate(cfg.problems):
        for j, alg in enumerate(cfg.algorithms):
            _run_config(cfg, problem, alg, 0, f"$.algorithms[{j}] on $.problems[{i}]")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("$", f"invalid JSON: {exc}") from None
    return parse_config(raw)


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigInvalid("--preset", f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    return parse_config(copy.deepcopy(PRESETS[name]))


def _run_config(cfg: ExperimentConfig, problem: ProblemSpec, alg: AlgorithmSpec, seed: int, path: str) -> RunConfig:
    settings = {**cfg.run, **alg.overrides}
    train = TrainConfig(**settings.pop("train", {}))
    if alg.acquisition is not None:
        settings["acquisition"] = AcquisitionSpec(**alg.acquisition)
    if cfg.match_evaluations and "iterations" not in alg.overrides:
        # equal evaluation budgets: k + R * g for the reference batch size
        g_ref = settings.get("good_enough_size", 10)
        r_ref = settings.get("iterations", 50)
        g_alg = 1 if alg.framework == "bo" else g_ref
        settings["iterations"] = math.ceil(r_ref * g_ref / g_alg)
    try:
        return RunConfig(objective=problem.objective(), framework=alg.framework, surrogate=alg.surrogate,
                         train=train, seed=seed, **settings)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(path, str(exc)) from None


def expand_trials(cfg: ExperimentConfig) -> list[TrialSpec]:
    out: list[TrialSpec] = []
    for i, problem in enumerate(cfg.problems):
        pid = problem.problem_id
        for j, alg in enumerate(cfg.algorithms):
            for t in range(cfg.trials):
                seed = cell_seed(cfg.base_seed, pid, t)
                rc = _run_config(cfg, problem, alg, seed, f"$.algorithms[{j}] on $.problems[{i}]")
                tid = f"{pid}__{alg.algorithm_id}__t{t:03d}"
                out.append(TrialSpec(tid, pid, alg.algorithm_id, t, seed, rc.to_dict()))
    return out
