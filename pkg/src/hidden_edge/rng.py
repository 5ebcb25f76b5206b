"""Keyed random streams.

Every stream is a counter-based Philox generator addressed by ``(seed, trial, tag)``, so a
trial's randomness does not depend on which worker runs it or in what order.
"""

from __future__ import annotations

import zlib

import numpy as np


def tag_key(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def make_rng(seed: int, trial: int = 0, tag: str = "") -> np.random.Generator:
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial), tag_key(tag)))
    return np.random.Generator(np.random.Philox(ss))
