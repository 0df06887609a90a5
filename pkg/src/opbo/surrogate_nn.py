"""Regression-NN baseline: the same network and optimizer as the
order-preserving surrogate, trained with squared error on standardized
targets instead of the listwise loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mlp
from .dataset import Dataset
from .mlp import MlpParams, TrainConfig
from .surrogate_op import _shuffle_rng


@dataclass(frozen=True)
class NnRegressionModel(MlpParams):
    target_mean: float = 0.0
    target_std: float = 1.0

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = mlp.check_input(self, X)
        return self.target_mean + self.target_std * mlp.forward(self.arrays(), X)

    def utility(self, X: np.ndarray) -> np.ndarray:
        """Larger is better: negated predicted objective."""
        return -self.predict(X)


def _mse_loss_and_grad(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    r = pred - target
    return float(np.mean(r * r)), 2.0 * r


def fit_regression(dataset: Dataset, config: TrainConfig = TrainConfig(), seed: int | None = None) -> NnRegressionModel:
    seed = config.seed if seed is None else seed
    arrays = mlp.xavier_arrays(dataset.dim, seed)
    y = dataset.y
    mean = float(np.mean(y)) if y.size else 0.0
    std = float(np.std(y)) if y.size else 1.0
    if not std > 0:
        std = 1.0
    if len(dataset) < 2:
        return mlp.params_from_arrays(NnRegressionModel, arrays, target_mean=mean, target_std=std)
    X = np.asarray(dataset.X, dtype=np.float64)
    arrays, trace = mlp.train(arrays, X, (y - mean) / std, _mse_loss_and_grad, config, _shuffle_rng(seed))
    return mlp.params_from_arrays(NnRegressionModel, arrays, trace, target_mean=mean, target_std=std)
