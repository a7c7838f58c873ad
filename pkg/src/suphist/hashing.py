"""Seeded multiply-shift hashing into ``[0, width)``."""
from __future__ import annotations

import numpy as np

_U32 = np.uint64(32)


def draw_seeds(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` (a, b) pairs with odd multipliers, shape (count, 2)."""
    seeds = rng.integers(0, 2**64, size=(count, 2), dtype=np.uint64, endpoint=False)
    seeds[:, 0] |= np.uint64(1)
    return seeds


def multiply_shift(x: np.ndarray, a: np.uint64, b: np.uint64, width: int) -> np.ndarray:
    """Top 32 bits of ``a*x + b`` (mod 2**64), scaled into ``[0, width)``."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        top = (a * x + b) >> _U32
    return ((top * np.uint64(width)) >> _U32).astype(np.int64)
