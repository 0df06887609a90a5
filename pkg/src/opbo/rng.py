"""Deterministic, label-keyed random streams.

Every consumer inside a trial asks for its own stream by name
(``"init"``, ``"candidates:3"``, ``"noise"``, ...). Streams are derived
from the root seed and a stable hash of the label, so adding a new
consumer never shifts the draws of an existing one.
"""

from __future__ import annotations

import zlib

import numpy as np


def label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def substream(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), label_key(label)]))


def subseed(seed: int, label: str) -> int:
    """Integer seed for APIs that take a seed rather than a generator."""
    ss = np.random.SeedSequence([int(seed), label_key(label)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
