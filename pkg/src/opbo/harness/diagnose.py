"""OPC and rank-correlation reports for sampled objective values.

The built-in 2-D test pair is the radial bump ``exp(-(x1^2 + x2^2)/2)``
and its inverse ``exp(+(x1^2 + x2^2)/2)`` on ``[-6, 6]^2``.
"""

from __future__ import annotations

import numpy as np

from .. import surrogate_nn, surrogate_op
from ..benchfn import ObjectiveFunction
from ..dataset import Dataset
from ..errors import TooFewPoints
from ..metrics import build_opc, spearman_rho
from ..mlp import TrainConfig
from ..rng import substream
from ..sampling import latin_hypercube

RBF_BOX = (-6.0, 6.0)


def rbf(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.exp(-np.sum(X * X, axis=1) / 2.0)


def inverse_rbf(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.exp(np.sum(X * X, axis=1) / 2.0)


TOY_FUNCTIONS = {"rbf": rbf, "inverse_rbf": inverse_rbf}


def diagnose(values, scores=None, true_values=None) -> dict:
    """OPC type and shape statistics of ``values``.

    When ``scores`` (surrogate utilities, larger = better) and the matching
    held-out ``true_values`` are given, also reports Spearman's rho between
    the scores and ``-true_values``.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size < 10:
        raise TooFewPoints(f"need at least 10 samples, got {values.size}")
    curve = build_opc(values)
    report = {
        "n": int(values.size),
        "opc_type": curve.opc_type,
        "signed_area": curve.signed_area,
        "half_value": curve.half_value,
    }
    if scores is not None and true_values is not None:
        report["spearman_rho"] = spearman_rho(scores, -np.asarray(true_values, dtype=np.float64))
    return report


def grid_2d(points_per_axis: int = 33, box=RBF_BOX) -> np.ndarray:
    g = np.linspace(box[0], box[1], points_per_axis)
    a, b = np.meshgrid(g, g, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel()])


def fit_toy_surrogate(kind: str, fn, n_train: int, seed: int, config: TrainConfig = TrainConfig(),
                      box=RBF_BOX):
    """Fit an ``op`` or ``nn`` surrogate on an LHS sample of a 2-D toy function.

    Returns the model and a callable mapping original coordinates to utility.
    """
    lo, hi = box
    U = latin_hypercube(2, n_train, substream(seed, "toy-train")).points
    data = Dataset(U, fn(lo + (hi - lo) * U))
    if kind == "op":
        model = surrogate_op.fit(data, config, seed)
    elif kind == "nn":
        model = surrogate_nn.fit_regression(data, config, seed)
    else:
        raise ValueError(f"unknown surrogate kind {kind!r}")
    return model, (lambda X: model.utility((np.asarray(X) - lo) / (hi - lo)))


def heldout_rho(kind: str, seed: int, function: str = "rbf", n_train: int = 200,
                config: TrainConfig = TrainConfig()) -> float:
    """Spearman's rho between surrogate utility and ``-f`` on a 33 x 33 grid."""
    fn = TOY_FUNCTIONS[function]
    _, utility = fit_toy_surrogate(kind, fn, n_train, seed, config)
    G = grid_2d()
    return spearman_rho(utility(G), -fn(G))


def sample_values(function: str, dim: int, n: int, seed: int) -> np.ndarray:
    gen = substream(seed, "diagnose")
    if function in TOY_FUNCTIONS:
        lo, hi = RBF_BOX
        return TOY_FUNCTIONS[function](gen.uniform(lo, hi, size=(n, 2)))
    fn = ObjectiveFunction(function, dim)
    return fn(fn.from_unit(gen.random((n, dim))))
