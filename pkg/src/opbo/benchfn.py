"""Synthetic minimization benchmarks: Ackley, Levy, Rosenbrock, Dixon-Price.

Functions are evaluated in their original coordinates (default box
``[-5, 10]^d``). Optimizers work on the unit cube, so :class:`ObjectiveFunction`
also owns the affine map between the two systems. Evaluation counting and
observation noise live in :class:`Evaluator` so every framework is charged
identically per true-function call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyDims, OutOfBounds, UnknownFunction
from .rng import as_generator

ACKLEY_A = 20.0
ACKLEY_B = 0.2
ACKLEY_C = 2.0 * math.pi

FUNCTION_NAMES = ("ackley", "levy", "rosenbrock", "dixonprice")
_MIN_DIM = {"ackley": 1, "levy": 2, "rosenbrock": 2, "dixonprice": 2}


def ackley(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    # means before the square root keep d = 1000 well scaled
    mean_sq = np.mean(x * x, axis=1)
    mean_cos = np.mean(np.cos(ACKLEY_C * x), axis=1)
    return (
        -ACKLEY_A * np.exp(-ACKLEY_B * np.sqrt(mean_sq))
        - np.exp(mean_cos)
        + ACKLEY_A
        + math.e
    )


def levy(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[:, 0]) ** 2
    wi = w[:, :-1]
    body = np.sum((wi - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wi + 1.0) ** 2), axis=1)
    wd = w[:, -1]
    tail = (wd - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * wd) ** 2)
    return head + body + tail


def rosenbrock(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.sum(100.0 * (x[:, 1:] - x[:, :-1] ** 2) ** 2 + (x[:, :-1] - 1.0) ** 2, axis=1)


def dixonprice(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    i = np.arange(2, x.shape[1] + 1, dtype=np.float64)
    return (x[:, 0] - 1.0) ** 2 + np.sum(i * (2.0 * x[:, 1:] ** 2 - x[:, :-1]) ** 2, axis=1)


_FUNCTIONS = {
    "ackley": ackley,
    "levy": levy,
    "rosenbrock": rosenbrock,
    "dixonprice": dixonprice,
}


def _canonical_name(name: str) -> str:
    key = name.lower().replace("-", "").replace("_", "")
    if key not in _FUNCTIONS:
        raise UnknownFunction(f"unknown benchmark function {name!r}; expected one of {FUNCTION_NAMES}")
    return key


@dataclass(frozen=True)
class ObjectiveFunction:
    """A named d-dimensional benchmark on a uniform box."""

    name: str
    dim: int
    lower_bound: float = -5.0
    upper_bound: float = 10.0
    noise_std: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "name", _canonical_name(self.name))
        if self.dim < _MIN_DIM[self.name]:
            raise DimensionMismatch(f"{self.name} needs dim >= {_MIN_DIM[self.name]}, got {self.dim}")
        if not self.lower_bound < self.upper_bound:
            raise ValueError("lower_bound must be < upper_bound")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")

    @property
    def problem_id(self) -> str:
        return f"{self.name}-d{self.dim}"

    def __call__(self, x: np.ndarray) -> np.ndarray | float:
        """Noiseless value(s) at ``x`` in original coordinates, no bounds check."""
        x = np.asarray(x, dtype=np.float64)
        out = _FUNCTIONS[self.name](x)
        return float(out[0]) if x.ndim == 1 else out

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.lower_bound) / (self.upper_bound - self.lower_bound)

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.lower_bound + np.asarray(u, dtype=np.float64) * (self.upper_bound - self.lower_bound)

    def check_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got shape {x.shape}")
        bad = np.flatnonzero((x < self.lower_bound) | (x > self.upper_bound) | ~np.isfinite(x))
        if bad.size:
            i = int(bad[0])
            raise OutOfBounds(i, float(x[i]), self.lower_bound, self.upper_bound)
        return x

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "noise_std": self.noise_std,
        }


@dataclass(frozen=True)
class EvaluationRecord:
    point: np.ndarray
    value: float
    true_value: float
    eval_index: int


class Evaluator:
    """Counts true-function calls and adds observation noise.

    One instance per trial; not thread-safe.
    """

    def __init__(self, fn: ObjectiveFunction, rng: np.random.Generator | int | None = None):
        self.fn = fn
        self.rng = as_generator(rng)
        self.n_evals = 0

    def evaluate(self, x: np.ndarray) -> EvaluationRecord:
        x = self.fn.check_point(x)
        true_value = self.fn(x)
        value = true_value
        if self.fn.noise_std > 0:
            value = true_value + self.fn.noise_std * float(self.rng.standard_normal())
        self.n_evals += 1
        return EvaluationRecord(point=x.copy(), value=float(value), true_value=float(true_value),
                                eval_index=self.n_evals)

    def evaluate_unit(self, u: np.ndarray) -> EvaluationRecord:
        return self.evaluate(self.fn.from_unit(u))

    def evaluate_batch_unit(self, U: np.ndarray) -> np.ndarray:
        """Observed values for each row of ``U`` (unit-cube coordinates)."""
        return np.array([self.evaluate_unit(u).value for u in np.atleast_2d(U)])


def evaluate(fn: ObjectiveFunction, x: np.ndarray, rng: np.random.Generator | int | None = None) -> EvaluationRecord:
    """One-shot evaluation with a throwaway counter (``eval_index`` is 1)."""
    return Evaluator(fn, rng).evaluate(x)


def known_minimum(fn: ObjectiveFunction) -> tuple[np.ndarray, float]:
    d = fn.dim
    if fn.name == "ackley":
        xmin = np.zeros(d)
    elif fn.name in ("levy", "rosenbrock"):
        xmin = np.ones(d)
    elif fn.name == "dixonprice":
        i = np.arange(1, d + 1, dtype=np.float64)
        # 2^-((2^i - 2) / 2^i) rewritten so 2^i never overflows
        xmin = 2.0 ** (-(1.0 - 2.0 ** (1.0 - i)))
    else:  # pragma: no cover - guarded by ObjectiveFunction
        raise UnknownFunction(fn.name)
    fn.check_point(xmin)
    return xmin, 0.0


def make_suite(dims, names=FUNCTION_NAMES, lower_bound: float = -5.0, upper_bound: float = 10.0) -> list[ObjectiveFunction]:
    dims = list(dims)
    if not dims:
        raise EmptyDims("make_suite needs at least one dimension")
    if any(d < 2 for d in dims):
        raise DimensionMismatch("all suite dimensions must be >= 2")
    return [ObjectiveFunction(name, d, lower_bound, upper_bound) for name in names for d in dims]
