"""Exact GP regression with an isotropic squared-exponential kernel.

Hyperparameters (lengthscale, signal variance, optionally noise variance)
are chosen by maximizing the log marginal likelihood: a 25 x 25 log grid
around the median pairwise distance, then coordinate-descent refinement.
Targets are standardized internally; predictions come back in objective
units.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, eigh, solve_triangular
from scipy.spatial.distance import cdist, pdist

from .dataset import Dataset
from .errors import DimensionMismatch, SampleCovarianceSingular, SingularKernel, TooManyPoints
from .rng import as_generator

log = logging.getLogger(__name__)

DEFAULT_NOISE = 1e-6
MAX_POINTS = 2000
MAX_TS_POINTS = 20000
GRID_SIZE = 25
REFINE_STEPS = 20
LENGTHSCALE_SPAN = (1.0 / 20.0, 20.0)  # multiples of the median distance
SIGNAL_SPAN = (1e-2, 1e2)
NOISE_SPAN = (1e-6, 1.0)
JITTERS = (0.0, 1e-6, 1e-4, 1e-2)
TS_JITTERS = (1e-8, 1e-6, 1e-4)
_LOG_2PI = math.log(2.0 * math.pi)


def se_kernel(x: np.ndarray, x_prime: np.ndarray, lengthscale: float, signal_variance: float) -> float:
    x = np.asarray(x, dtype=np.float64)
    x_prime = np.asarray(x_prime, dtype=np.float64)
    if x.shape != x_prime.shape:
        raise DimensionMismatch(f"shapes {x.shape} and {x_prime.shape} differ")
    if not lengthscale > 0:
        raise ValueError("lengthscale must be > 0")
    sq = float(np.sum((x - x_prime) ** 2))
    return signal_variance * math.exp(-sq / (2.0 * lengthscale**2))


def se_kernel_matrix(A: np.ndarray, B: np.ndarray, lengthscale: float, signal_variance: float) -> np.ndarray:
    sq = cdist(A, B, "sqeuclidean")
    return signal_variance * np.exp(-sq / (2.0 * lengthscale**2))


@dataclass(frozen=True)
class GpModel:
    train_inputs: np.ndarray
    train_targets_standardized: np.ndarray
    target_mean: float
    target_std: float
    lengthscale: float
    signal_variance: float
    noise_variance: float
    cholesky_lower: np.ndarray
    solve_vector: np.ndarray
    log_marginal_likelihood: float

    @property
    def input_dim(self) -> int:
        return self.train_inputs.shape[1]

    def hyperparameters(self) -> dict:
        return {
            "lengthscale": self.lengthscale,
            "signal_variance": self.signal_variance,
            "noise_variance": self.noise_variance,
            "log_marginal_likelihood": self.log_marginal_likelihood,
        }


@dataclass(frozen=True)
class PosteriorPrediction:
    mean: np.ndarray
    std: np.ndarray


def standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(np.mean(y))
    std = float(np.std(y))
    if not std > 0:
        log.warning("constant targets; using target_std = 1")
        std = 1.0
    return (y - mean) / std, mean, std


def destandardize(z: np.ndarray, mean: float, std: float) -> np.ndarray:
    return z * std + mean


def log_marginal_likelihood(sqdist: np.ndarray, y: np.ndarray, lengthscale: float,
                            signal_variance: float, noise_variance: float) -> float:
    """Cholesky route; ``-inf`` when the kernel is not numerically PD."""
    n = y.shape[0]
    K = signal_variance * np.exp(-sqdist / (2.0 * lengthscale**2))
    K[np.diag_indices(n)] += noise_variance
    try:
        L = cholesky(K, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return -math.inf
    alpha = cho_solve((L, True), y, check_finite=False)
    return float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * _LOG_2PI)


def _grid_search(sqdist: np.ndarray, y: np.ndarray, log_ls: np.ndarray, log_sf: np.ndarray,
                 noise_variance: float) -> tuple[float, float, float]:
    """Best (log ell, log sf2, lml) on the grid; one eigendecomposition per lengthscale."""
    n = y.shape[0]
    best = (float(log_ls[0]), float(log_sf[0]), -math.inf)
    sf2 = np.exp(log_sf)[:, None]
    for lls in log_ls:
        R = np.exp(-sqdist / (2.0 * math.exp(2.0 * lls)))
        lam, Q = eigh(R, driver="evd", check_finite=False)
        lam = np.maximum(lam, 0.0)
        proj2 = (Q.T @ y) ** 2
        ev = sf2 * lam[None, :] + noise_variance
        lml = -0.5 * np.sum(proj2 / ev, axis=1) - 0.5 * np.sum(np.log(ev), axis=1) - 0.5 * n * _LOG_2PI
        j = int(np.argmax(lml))
        if lml[j] > best[2]:
            best = (float(lls), float(log_sf[j]), float(lml[j]))
    return best


def _refine(sqdist, y, theta, bounds, steps, step0):
    """Coordinate descent in log space: one coordinate probed per step, the
    step size halves after a full sweep without improvement."""
    theta = list(theta)

    def objective(t):
        return log_marginal_likelihood(sqdist, y, math.exp(t[0]), math.exp(t[1]), math.exp(t[2]))

    free = [i for i, (lo, hi) in enumerate(bounds) if hi > lo]
    if not free:
        return theta, objective(theta)
    best = objective(theta)
    delta = step0
    improved_in_sweep = False
    for step in range(steps):
        i = free[step % len(free)]
        for sign in (1.0, -1.0):
            cand = list(theta)
            cand[i] = min(max(cand[i] + sign * delta, bounds[i][0]), bounds[i][1])
            val = objective(cand)
            if val > best:
                theta, best = cand, val
                improved_in_sweep = True
                break
        if step % len(free) == len(free) - 1:
            if not improved_in_sweep:
                delta *= 0.5
            improved_in_sweep = False
    return theta, best


def fit_gp(dataset: Dataset, noise_variance: float | None = None, learn_noise: bool = False,
           max_points: int = MAX_POINTS) -> GpModel:
    X = np.asarray(dataset.X, dtype=np.float64)
    n = X.shape[0]
    if n < 1:
        raise ValueError("fit_gp needs at least one point")
    if n > max_points:
        raise TooManyPoints(f"{n} points exceeds the cap of {max_points}")
    y, mean, std = standardize(dataset.y)
    sqdist = cdist(X, X, "sqeuclidean")

    noise = DEFAULT_NOISE if noise_variance is None else float(noise_variance)
    if n > 1:
        med = float(np.median(pdist(X)))
        if not med > 0:
            med = 1.0
    else:
        med = 1.0
    ls_lo, ls_hi = math.log(med * LENGTHSCALE_SPAN[0]), math.log(med * LENGTHSCALE_SPAN[1])
    sf_lo, sf_hi = math.log(SIGNAL_SPAN[0]), math.log(SIGNAL_SPAN[1])
    log_ls = np.linspace(ls_lo, ls_hi, GRID_SIZE)
    log_sf = np.linspace(sf_lo, sf_hi, GRID_SIZE)

    lls, lsf, _ = _grid_search(sqdist, y, log_ls, log_sf, noise)
    lnoise = math.log(noise)
    noise_bounds = (math.log(NOISE_SPAN[0]), math.log(NOISE_SPAN[1])) if learn_noise else (lnoise, lnoise)
    grid_step = float(log_ls[1] - log_ls[0])
    (lls, lsf, lnoise), _ = _refine(
        sqdist, y, (lls, lsf, lnoise),
        [(ls_lo, ls_hi), (sf_lo, sf_hi), noise_bounds],
        REFINE_STEPS, grid_step / 2.0,
    )
    return _factorize(X, y, mean, std, sqdist, math.exp(lls), math.exp(lsf), math.exp(lnoise))


def fit_gp_fixed(dataset: Dataset, lengthscale: float, signal_variance: float,
                 noise_variance: float = DEFAULT_NOISE) -> GpModel:
    """Factorize with given hyperparameters, no selection."""
    X = np.asarray(dataset.X, dtype=np.float64)
    y, mean, std = standardize(dataset.y)
    return _factorize(X, y, mean, std, cdist(X, X, "sqeuclidean"), lengthscale, signal_variance, noise_variance)


def _factorize(X, y, mean, std, sqdist, ls, sf2, noise) -> GpModel:
    n = X.shape[0]
    K = sf2 * np.exp(-sqdist / (2.0 * ls**2))
    for jitter in JITTERS:
        Kj = K.copy()
        Kj[np.diag_indices(n)] += noise + jitter
        try:
            L = cholesky(Kj, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        if jitter:
            log.warning("kernel needed jitter %.0e", jitter)
        alpha = cho_solve((L, True), y, check_finite=False)
        lml = float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * _LOG_2PI)
        return GpModel(X, y, mean, std, ls, sf2, noise + jitter, L, alpha, lml)
    raise SingularKernel(f"Cholesky failed for n={n} even with jitter {JITTERS[-1]}")


def _check_dim(model: GpModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(0, model.input_dim) if X.size == 0 else X[None, :]
    if X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"model expects {model.input_dim} columns, got {X.shape[1]}")
    return X


def posterior(model: GpModel, X: np.ndarray) -> PosteriorPrediction:
    X = _check_dim(model, X)
    if X.shape[0] == 0:
        return PosteriorPrediction(np.empty(0), np.empty(0))
    Ks = se_kernel_matrix(model.train_inputs, X, model.lengthscale, model.signal_variance)
    mu = Ks.T @ model.solve_vector
    v = solve_triangular(model.cholesky_lower, Ks, lower=True, check_finite=False)
    var = np.maximum(model.signal_variance - np.sum(v * v, axis=0), 0.0)
    return PosteriorPrediction(destandardize(mu, model.target_mean, model.target_std),
                               np.sqrt(var) * model.target_std)


def thompson_sample(model: GpModel, X: np.ndarray, rng=None) -> np.ndarray:
    """One joint posterior draw over the rows of ``X``, in objective units."""
    X = _check_dim(model, X)
    m = X.shape[0]
    if m > MAX_TS_POINTS:
        raise TooManyPoints(f"{m} candidates exceeds the joint-sampling cap {MAX_TS_POINTS}")
    gen = as_generator(rng)
    if m == 0:
        return np.empty(0)
    Ks = se_kernel_matrix(model.train_inputs, X, model.lengthscale, model.signal_variance)
    mu = Ks.T @ model.solve_vector
    v = solve_triangular(model.cholesky_lower, Ks, lower=True, check_finite=False)
    cov = se_kernel_matrix(X, X, model.lengthscale, model.signal_variance) - v.T @ v
    z = gen.standard_normal(m)
    for jitter in TS_JITTERS:
        c = cov.copy()
        c[np.diag_indices(m)] += jitter
        try:
            L = cholesky(c, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        return destandardize(mu + L @ z, model.target_mean, model.target_std)
    raise SampleCovarianceSingular(f"posterior covariance over {m} points is not PD")
