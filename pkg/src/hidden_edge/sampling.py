"""Vectorized T_p sampling for many blocks at once."""

from __future__ import annotations

import math

import numpy as np


def bernoulli_positions(length: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted positions in ``range(length)`` kept by independent Bernoulli(p) trials.

    Draws geometric gaps between successes, so the cost is proportional to the
    number of successes rather than to ``length``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if length <= 0 or p == 0.0:
        return np.zeros(0, dtype=np.int64)
    if p == 1.0:
        return np.arange(length, dtype=np.int64)
    scale = 1.0 / math.log1p(-p)
    parts = []
    last = -1
    while True:
        remaining = (length - 1 - last) * p
        k = int(remaining + 8 * math.sqrt(remaining) + 64)
        # inversion: floor(ln U / ln(1-p)) + 1 is Geometric(p) for U in (0, 1]
        u = 1.0 - rng.random(k)
        gaps = (np.log(u) * scale).astype(np.int64) + 1
        steps = last + np.cumsum(gaps)
        parts.append(steps[steps < length])
        if steps[-1] >= length:
            break
        last = int(steps[-1])
    return np.concatenate(parts)


def sample_blocks(count: int, universe: int, p: float, rng: np.random.Generator):
    """``count`` independent T_p samples of ``range(universe)``.

    Returns ``(members, offsets, block)``: block b is
    ``members[offsets[b]:offsets[b+1]]`` (ascending) and ``block[j]`` is the
    block owning ``members[j]``.
    """
    pos = bernoulli_positions(count * universe, p, rng)
    offsets = np.zeros(count + 1, dtype=np.int64)
    if universe == 0:
        return pos, offsets, pos
    block = pos // universe
    members = pos - block * universe
    np.cumsum(np.bincount(block, minlength=count), out=offsets[1:])
    return members, offsets, block
