"""Initial designs and candidate sets on the unit cube."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GridTooLarge, InvalidSideLength, InvalidSize
from .rng import as_generator

GRID_CAP = 10**6
TR_PERTURB_DIMS = 20  # expected perturbed coordinates per trust-region candidate
TR_MAX_SIDE = 1.6

STRATEGIES = ("rs", "lhs", "grid", "turbo")


@dataclass(frozen=True)
class CandidateSet:
    points: np.ndarray
    origin: str
    seed: int | None = None

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _check_size(d: int, n: int) -> None:
    if d < 1 or n < 1:
        raise InvalidSize(f"need d >= 1 and N >= 1, got d={d}, N={n}")


def _seed_of(rng) -> int | None:
    return int(rng) if isinstance(rng, (int, np.integer)) else None


def random_sampling(d: int, n: int, rng=None) -> CandidateSet:
    _check_size(d, n)
    gen = as_generator(rng)
    return CandidateSet(gen.random((n, d)), "random", _seed_of(rng))


def lhs_points(d: int, n: int, gen: np.random.Generator) -> np.ndarray:
    # independent permutation per column: argsort of uniforms is a random permutation
    strata = np.argsort(gen.random((n, d)), axis=0)
    return (strata + gen.random((n, d))) / n


def latin_hypercube(d: int, n: int, rng=None) -> CandidateSet:
    _check_size(d, n)
    gen = as_generator(rng)
    return CandidateSet(lhs_points(d, n, gen), "lhs", _seed_of(rng))


def grid_sampling(d: int, points_per_axis: int, cap: int = GRID_CAP) -> CandidateSet:
    if d < 1:
        raise InvalidSize(f"need d >= 1, got {d}")
    if points_per_axis < 2:
        raise InvalidSize("points_per_axis must be >= 2")
    if points_per_axis**d > cap:
        raise GridTooLarge(f"{points_per_axis}^{d} points exceeds cap {cap}")
    axis = np.linspace(0.0, 1.0, points_per_axis)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return CandidateSet(np.stack([m.ravel() for m in mesh], axis=1), "grid")


def trust_region_candidates(center: np.ndarray, side_length: float, d: int, n: int, rng=None) -> CandidateSet:
    """Candidates in the box ``center +- L/2`` clipped to the cube.

    Each candidate only moves a random subset of coordinates away from the
    center, with per-coordinate probability ``min(20/d, 1)``; at least one
    coordinate always moves.
    """
    _check_size(d, n)
    center = np.asarray(center, dtype=np.float64)
    if center.shape != (d,):
        raise DimensionMismatch(f"center has shape {center.shape}, expected ({d},)")
    if not (0.0 < side_length <= TR_MAX_SIDE):
        raise InvalidSideLength(f"side length must be in (0, {TR_MAX_SIDE}], got {side_length}")
    if np.any(center < 0) or np.any(center > 1):
        raise ValueError("trust-region center must lie in the unit cube")
    gen = as_generator(rng)
    lb = np.clip(center - side_length / 2.0, 0.0, 1.0)
    ub = np.clip(center + side_length / 2.0, 0.0, 1.0)
    pert = lb + (ub - lb) * lhs_points(d, n, gen)

    prob = min(TR_PERTURB_DIMS / d, 1.0)
    mask = gen.random((n, d)) <= prob
    empty = np.flatnonzero(~mask.any(axis=1))
    if empty.size:
        mask[empty, gen.integers(0, d, size=empty.size)] = True

    points = np.tile(center, (n, 1))
    points[mask] = pert[mask]
    return CandidateSet(points, "turbo", _seed_of(rng))


def sample(strategy: str, d: int, n: int, rng=None, **kwargs) -> CandidateSet:
    """Dispatch by config name: ``rs``, ``lhs``, ``grid``."""
    if strategy == "rs":
        return random_sampling(d, n, rng)
    if strategy == "lhs":
        return latin_hypercube(d, n, rng)
    if strategy == "grid":
        ppa = kwargs.get("points_per_axis") or max(2, int(np.floor(n ** (1.0 / d))))
        return grid_sampling(d, ppa)
    raise ValueError(f"unknown sampling strategy {strategy!r}")
