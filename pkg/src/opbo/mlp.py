"""Two-hidden-layer ReLU scoring network with manual backprop and Adam.

Shared by the order-preserving surrogate and the regression baseline; the
two differ only in the loss gradient fed into :func:`train`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NonFiniteLoss

HIDDEN = 128
PARAM_NAMES = ("weights_1", "bias_1", "weights_2", "bias_2", "weights_out", "bias_out")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.01
    batch_size: int = 2000
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class MlpParams:
    weights_1: np.ndarray  # (hidden, d)
    bias_1: np.ndarray  # (hidden,)
    weights_2: np.ndarray  # (hidden, hidden)
    bias_2: np.ndarray  # (hidden,)
    weights_out: np.ndarray  # (1, hidden)
    bias_out: float
    activation: str = "relu"
    loss_trace: tuple = field(default=(), compare=False)

    @property
    def input_dim(self) -> int:
        return self.weights_1.shape[1]

    @property
    def hidden(self) -> int:
        return self.weights_1.shape[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: np.asarray(getattr(self, name), dtype=np.float64) for name in PARAM_NAMES}

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays().values())


def _uniform(gen: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return gen.uniform(-bound, bound, size=(fan_out, fan_in))


def xavier_arrays(d: int, seed: int, hidden: int = HIDDEN) -> dict[str, np.ndarray]:
    if d < 1:
        raise ValueError("input dimension must be >= 1")
    gen = np.random.default_rng(seed)
    return {
        "weights_1": _uniform(gen, hidden, d),
        "bias_1": np.zeros(hidden),
        "weights_2": _uniform(gen, hidden, hidden),
        "bias_2": np.zeros(hidden),
        "weights_out": _uniform(gen, 1, hidden),
        "bias_out": np.zeros(()),
    }


def forward(p: dict[str, np.ndarray], X: np.ndarray, keep: bool = False):
    z1 = X @ p["weights_1"].T + p["bias_1"]
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ p["weights_2"].T + p["bias_2"]
    h2 = np.maximum(z2, 0.0)
    s = h2 @ p["weights_out"][0] + p["bias_out"]
    if keep:
        return s, (X, z1, h1, z2, h2)
    return s


def backward(p: dict[str, np.ndarray], cache, ds: np.ndarray) -> dict[str, np.ndarray]:
    """Parameter gradients given dLoss/dscores ``ds``."""
    X, z1, h1, z2, h2 = cache
    w_out = p["weights_out"][0]
    dz2 = np.outer(ds, w_out) * (z2 > 0)
    dz1 = (dz2 @ p["weights_2"]) * (z1 > 0)
    return {
        "weights_out": (ds @ h2)[None, :],
        "bias_out": np.asarray(ds.sum()),
        "weights_2": dz2.T @ h1,
        "bias_2": dz2.sum(axis=0),
        "weights_1": dz1.T @ X,
        "bias_1": dz1.sum(axis=0),
    }


def check_input(params: MlpParams, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != params.input_dim:
        raise DimensionMismatch(f"model expects {params.input_dim} columns, got {X.shape[1]}")
    return X


class Adam:
    def __init__(self, params: dict[str, np.ndarray], config: TrainConfig):
        self.cfg = config
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        c = self.cfg
        self.t += 1
        bc1 = 1.0 - c.adam_beta1**self.t
        bc2 = 1.0 - c.adam_beta2**self.t
        for k in PARAM_NAMES:
            g = grads[k]
            self.m[k] = c.adam_beta1 * self.m[k] + (1.0 - c.adam_beta1) * g
            self.v[k] = c.adam_beta2 * self.v[k] + (1.0 - c.adam_beta2) * g * g
            params[k] = params[k] - c.learning_rate * (self.m[k] / bc1) / (np.sqrt(self.v[k] / bc2) + c.adam_epsilon)


# loss_and_grad(scores, targets) -> (loss, dLoss/dscores), both for one chunk
LossFn = Callable[[np.ndarray, np.ndarray], tuple[float, np.ndarray]]


def train(
    params: dict[str, np.ndarray],
    X: np.ndarray,
    targets: np.ndarray,
    loss_and_grad: LossFn,
    config: TrainConfig,
    shuffle_rng: np.random.Generator,
) -> tuple[dict[str, np.ndarray], list[float]]:
    """Run ``config.epochs`` shuffled minibatch passes of Adam.

    Returns the trained arrays and the per-epoch mean chunk loss. The
    chunk loss is whatever ``loss_and_grad`` reports; the gradient it
    returns is averaged over the chunk before backprop.
    """
    params = {k: np.array(v, dtype=np.float64, copy=True) for k, v in params.items()}
    if not all(np.all(np.isfinite(v)) for v in params.values()):
        raise NonFiniteLoss(0, config.learning_rate, "initial parameters are not finite")
    opt = Adam(params, config)
    trace: list[float] = []
    # divergence is reported through NonFiniteLoss, not floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, config.epochs + 1):
            trace.append(_epoch(params, X, targets, loss_and_grad, config, shuffle_rng, opt, epoch))
    return params, trace


def _epoch(params, X, targets, loss_and_grad, config, shuffle_rng, opt, epoch) -> float:
    order = shuffle_rng.permutation(X.shape[0])
    losses = []
    for start in range(0, order.size, config.batch_size):
        idx = order[start:start + config.batch_size]
        s, cache = forward(params, X[idx], keep=True)
        loss, ds = loss_and_grad(s, targets[idx])
        if not np.isfinite(loss) or not np.all(np.isfinite(ds)):
            raise NonFiniteLoss(epoch, config.learning_rate, "loss or score gradient")
        grads = backward(params, cache, ds / idx.size)
        opt.step(params, grads)
        losses.append(loss)
    if not all(np.all(np.isfinite(v)) for v in params.values()):
        raise NonFiniteLoss(epoch, config.learning_rate, "parameters")
    return float(np.mean(losses))


def params_from_arrays(cls, arrays: dict[str, np.ndarray], loss_trace=(), **extra):
    return cls(
        weights_1=arrays["weights_1"],
        bias_1=arrays["bias_1"],
        weights_2=arrays["weights_2"],
        bias_2=arrays["bias_2"],
        weights_out=arrays["weights_out"],
        bias_out=float(arrays["bias_out"]),
        loss_trace=tuple(loss_trace),
        **extra,
    )


def with_trace(params: MlpParams, trace) -> MlpParams:
    return replace(params, loss_trace=tuple(trace))
