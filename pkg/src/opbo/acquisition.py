"""Acquisition values over a finite candidate set, and top-g selection.

Every acquisition is oriented "larger is better" for a minimization
problem, so selection is always a top-g max.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .dataset import Dataset
from .errors import DimensionMismatch, IncompatibleSurrogateAcquisition, InvalidG
from .sampling import CandidateSet
from .surrogate_gp import GpModel, PosteriorPrediction, posterior, thompson_sample

log = logging.getLogger(__name__)

KINDS = ("ei", "ucb", "ts", "greedy")
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class AcquisitionSpec:
    kind: str = "ts"
    kappa: float = 1.96
    minimize: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown acquisition {self.kind!r}; expected one of {KINDS}")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if not self.minimize:
            raise ValueError("only minimization is supported")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "kappa": self.kappa, "minimize": self.minimize}


@dataclass(frozen=True)
class GoodEnoughSet:
    points: np.ndarray
    acquisition_values: np.ndarray
    indices: np.ndarray


def expected_improvement(pred: PosteriorPrediction, best_observed: float) -> np.ndarray:
    mu = np.asarray(pred.mean, dtype=np.float64)
    sigma = np.asarray(pred.std, dtype=np.float64)
    improvement = best_observed - mu
    out = np.maximum(improvement, 0.0)
    pos = sigma > 0
    if np.any(pos):
        s = sigma[pos]
        # subnormal sigma sends z to +-inf; ndtr and exp handle that correctly
        with np.errstate(over="ignore"):
            z = improvement[pos] / s
            ei = improvement[pos] * ndtr(z) + s * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
        out[pos] = np.maximum(ei, 0.0)  # round-off can leave tiny negatives far below best
    return out


def upper_confidence_bound(pred: PosteriorPrediction, kappa: float) -> np.ndarray:
    """Negated lower confidence bound ``-(mu - kappa * sigma)``."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    return -(np.asarray(pred.mean) - kappa * np.asarray(pred.std))


def acquire(surrogate, candidates: CandidateSet | np.ndarray, spec: AcquisitionSpec,
            dataset: Dataset, rng=None) -> np.ndarray:
    X = candidates.points if isinstance(candidates, CandidateSet) else np.atleast_2d(candidates)
    if isinstance(surrogate, GpModel):
        if X.shape[1] != surrogate.input_dim:
            raise DimensionMismatch(f"candidates have {X.shape[1]} columns, surrogate expects {surrogate.input_dim}")
        if spec.kind == "ts":
            return -thompson_sample(surrogate, X, rng)
        pred = posterior(surrogate, X)
        if spec.kind == "ei":
            return expected_improvement(pred, float(np.min(dataset.y)))
        if spec.kind == "ucb":
            return upper_confidence_bound(pred, spec.kappa)
        return -pred.mean
    # MLP surrogates: point utility, no variance
    if spec.kind == "ts":
        raise IncompatibleSurrogateAcquisition("Thompson sampling needs a GP posterior")
    if spec.kind in ("ei", "ucb"):
        log.info("%s on a variance-free surrogate reduces to greedy score ordering", spec.kind)
    return surrogate.utility(X)


def select_top_g(values: np.ndarray, candidates: CandidateSet | np.ndarray, g: int) -> GoodEnoughSet:
    values = np.asarray(values, dtype=np.float64)
    m = values.shape[0]
    if not 1 <= g <= m:
        raise InvalidG(f"g must be in [1, {m}], got {g}")
    # stable sort on the negation: descending value, ties by smaller index
    idx = np.argsort(-values, kind="stable")[:g]
    X = candidates.points if isinstance(candidates, CandidateSet) else np.atleast_2d(candidates)
    return GoodEnoughSet(X[idx].copy(), values[idx].copy(), idx)
