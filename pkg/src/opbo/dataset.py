from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Dataset:
    """Observed (point, value) pairs; points are in unit-cube coordinates."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"{self.X.shape[0]} points but {self.y.shape[0]} values")

    @classmethod
    def empty(cls, d: int) -> "Dataset":
        return cls(np.empty((0, d)), np.empty(0))

    def __len__(self) -> int:
        return self.y.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def append(self, X: np.ndarray, y: np.ndarray) -> None:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        self.X = np.vstack([self.X, X])
        self.y = np.concatenate([self.y, np.asarray(y, dtype=np.float64).reshape(-1)])

    def best(self) -> tuple[np.ndarray, float]:
        """Arg-min pair; the first occurrence wins on ties."""
        i = int(np.argmin(self.y))
        return self.X[i].copy(), float(self.y[i])
