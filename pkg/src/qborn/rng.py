"""Seeded random streams.

Every random draw in the package comes from ``stream(seed, *key)``: a PCG64
generator seeded by ``SeedSequence(seed, spawn_key=key)``. Keys name the
consumer, e.g. ``(point_index, block_index)`` for shot block ``block_index``
of grid point ``point_index``, so results never depend on scheduling or
thread count.
"""
import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and stream keys must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))
