"""Order-preserving surrogate: an MLP scorer trained with a Plackett-Luce
listwise negative log-likelihood.

Only the order of the observed values enters training. Targets are turned
into fitness ``-y`` (lower objective is better), sorted descending, and the
network is pushed to reproduce that permutation with its scores. High score
therefore means a good (low) objective value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import mlp
from .dataset import Dataset
from .errors import NonFiniteLoss
from .mlp import MlpParams, TrainConfig


@dataclass(frozen=True)
class OpSurrogateModel(MlpParams):
    """Trained (or freshly initialized) order-preserving scorer."""

    def score(self, X: np.ndarray) -> np.ndarray:
        return score(self, X)

    def utility(self, X: np.ndarray) -> np.ndarray:
        return score(self, X)


@dataclass(frozen=True)
class RankingBatch:
    inputs: np.ndarray
    targets: np.ndarray  # fitness = -y
    permutation: np.ndarray  # 0-based; targets[permutation] is non-increasing


def ranking_permutation(y: np.ndarray) -> np.ndarray:
    """Best-first order of objective values ``y`` (minimization).

    Descending fitness ``-y`` equals ascending ``y``; a stable sort breaks
    ties by original index.
    """
    return np.argsort(np.asarray(y, dtype=np.float64), kind="stable")


def ranking_batch(inputs: np.ndarray, y: np.ndarray) -> RankingBatch:
    y = np.asarray(y, dtype=np.float64)
    return RankingBatch(np.asarray(inputs), -y, ranking_permutation(y))


def xavier_init(d: int, seed: int, hidden: int = mlp.HIDDEN) -> OpSurrogateModel:
    return mlp.params_from_arrays(OpSurrogateModel, mlp.xavier_arrays(d, seed, hidden))


def score(model: MlpParams, X: np.ndarray) -> np.ndarray:
    X = mlp.check_input(model, X)
    return mlp.forward(model.arrays(), X)


def _suffix_logsumexp(s_sorted: np.ndarray) -> np.ndarray:
    # right-to-left running log-sum-exp; logaddexp rescales by the running max
    return np.logaddexp.accumulate(s_sorted[::-1])[::-1]


def pl_loss(scores: np.ndarray, permutation: np.ndarray) -> float:
    """Plackett-Luce negative log-likelihood of ``permutation`` under ``scores``.

    ``L = sum_i [ logsumexp(s[pi[i:]]) - s[pi[i]] ]``, nonnegative term by term.
    """
    s = np.asarray(scores, dtype=np.float64)[np.asarray(permutation)]
    if s.size <= 1:
        return 0.0
    return float(np.sum(_suffix_logsumexp(s) - s))


def pl_loss_gradient(scores: np.ndarray, permutation: np.ndarray) -> np.ndarray:
    """dL/dscores, in the original (unpermuted) index order.

    For the item at sorted position j:
    ``-1 + sum_{i<=j} exp(s_j - lse_i)`` where ``lse_i`` is the suffix
    log-sum-exp starting at position i.
    """
    perm = np.asarray(permutation)
    s = np.asarray(scores, dtype=np.float64)[perm]
    grad = np.zeros_like(s)
    if s.size > 1:
        lse = _suffix_logsumexp(s)
        acc = np.logaddexp.accumulate(-lse)
        grad_sorted = np.exp(s + acc) - 1.0
        grad[perm] = grad_sorted
    return grad


def _pl_loss_and_grad(scores: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    perm = ranking_permutation(y)
    return pl_loss(scores, perm), pl_loss_gradient(scores, perm)


def _shuffle_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), 0x5EED]))


def fit(dataset: Dataset, config: TrainConfig = TrainConfig(), seed: int | None = None) -> OpSurrogateModel:
    """Cold fit: fresh Xavier init, then ``config.epochs`` Adam passes.

    The per-epoch loss trace is attached as ``model.loss_trace``. With fewer
    than two points the initialized model is returned with an empty trace.
    """
    seed = config.seed if seed is None else seed
    model = xavier_init(dataset.dim, seed)
    if len(dataset) < 2:
        return model
    return _train(model, dataset, config, seed)


def refit_warm(model: OpSurrogateModel, dataset: Dataset, config: TrainConfig = TrainConfig()) -> OpSurrogateModel:
    """Continue training from ``model`` with fresh Adam moments."""
    if not model.is_finite():
        raise NonFiniteLoss(0, config.learning_rate, "warm-start parameters are not finite")
    if len(dataset) < 2:
        return model
    return _train(model, dataset, config, config.seed)


def _train(model: MlpParams, dataset: Dataset, config: TrainConfig, seed: int) -> OpSurrogateModel:
    X = mlp.check_input(model, dataset.X)
    arrays, trace = mlp.train(model.arrays(), X, dataset.y, _pl_loss_and_grad, config, _shuffle_rng(seed))
    return mlp.params_from_arrays(OpSurrogateModel, arrays, trace)


def to_json(model: MlpParams, config: TrainConfig | None = None) -> str:
    payload = {name: np.asarray(a).tolist() for name, a in model.arrays().items()}
    payload["activation"] = model.activation
    payload["input_dim"] = model.input_dim
    payload["loss_trace"] = list(model.loss_trace)
    if config is not None:
        payload["config"] = config.to_dict()
    return json.dumps(payload)


def from_json(text: str) -> OpSurrogateModel:
    payload = json.loads(text)
    arrays = {name: np.asarray(payload[name], dtype=np.float64) for name in mlp.PARAM_NAMES}
    return mlp.params_from_arrays(OpSurrogateModel, arrays, payload.get("loss_trace", ()))
