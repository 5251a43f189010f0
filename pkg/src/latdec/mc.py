"""Monte Carlo plumbing: counter-based block generators, Wilson intervals, block maps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

Z95 = 1.959963984540054


def block_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox stream keyed on (seed, *keys); independent of how blocks are scheduled."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


def wilson(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval as (center, half-width)."""
    if n == 0:
        return 0.5, 0.5
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return center, half


def map_blocks(fn, blocks, workers: int = 1):
    """Apply fn to each block index, preserving order. fn must be pure."""
    blocks = list(blocks)
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, blocks))


def entropy_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2**63))
