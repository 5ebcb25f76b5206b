"""Random graph families used as hidden inputs."""

from __future__ import annotations

import math

import numpy as np

from .adversaries import hard_star_sample
from .graph import HiddenGraph


def _graph(n: int, lo: np.ndarray, hi: np.ndarray) -> HiddenGraph:
    return HiddenGraph(n, np.stack([np.minimum(lo, hi), np.maximum(lo, hi)], axis=1).astype(np.int64))


def empty_graph(n: int) -> HiddenGraph:
    return HiddenGraph(n, np.zeros((0, 2), dtype=np.int64))


def complete_graph(n: int) -> HiddenGraph:
    u, v = np.triu_indices(n, k=1)
    return _graph(n, u, v)


def clique_on(n: int, members) -> HiddenGraph:
    m = np.sort(np.asarray(list(members), dtype=np.int64))
    i, j = np.triu_indices(m.size, k=1)
    return _graph(n, m[i], m[j])


def planted_edge(n: int, rng: np.random.Generator) -> HiddenGraph:
    if n < 2:
        raise ValueError("a planted edge needs n >= 2")
    u, v = rng.choice(n, size=2, replace=False)
    return _graph(n, np.array([u]), np.array([v]))


def planted_clique(n: int, size: int, rng: np.random.Generator) -> HiddenGraph:
    if not 0 <= size <= n:
        raise ValueError(f"clique size {size} outside [0, {n}]")
    return clique_on(n, rng.choice(n, size=size, replace=False))


def planted_star(n: int, degree: int, rng: np.random.Generator) -> HiddenGraph:
    if not 0 <= degree <= n - 1:
        raise ValueError(f"star degree {degree} outside [0, {n - 1}]")
    center = int(rng.integers(n))
    leaves = rng.choice(np.delete(np.arange(n), center), size=degree, replace=False)
    return _graph(n, np.full(degree, center), leaves)


def random_matching(n: int, size: int, rng: np.random.Generator) -> HiddenGraph:
    if not 0 <= 2 * size <= n:
        raise ValueError(f"a matching of {size} edges does not fit in {n} vertices")
    ends = rng.permutation(n)[: 2 * size].reshape(size, 2)
    return _graph(n, ends[:, 0], ends[:, 1])


def overlapping_product(n: int, a, b) -> HiddenGraph:
    """Edges {x, y} with x in a, y in b, x != y."""
    a = np.unique(np.asarray(list(a), dtype=np.int64))
    b = np.unique(np.asarray(list(b), dtype=np.int64))
    x = np.repeat(a, b.size)
    y = np.tile(b, a.size)
    keep = x != y
    pairs = np.unique(np.stack([np.minimum(x, y), np.maximum(x, y)], axis=1)[keep], axis=0)
    return HiddenGraph(n, pairs.reshape(-1, 2))


def random_overlapping_product(n: int, a_size: int, b_size: int, rng: np.random.Generator) -> HiddenGraph:
    return overlapping_product(n, rng.choice(n, a_size, replace=False), rng.choice(n, b_size, replace=False))


def gnp(n: int, p: float, rng: np.random.Generator) -> HiddenGraph:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(u.size) < p
    return _graph(n, u[keep], v[keep])


def hard_star(n: int, rng: np.random.Generator) -> HiddenGraph:
    return hard_star_sample(n, rng)


def default_star_degree(n: int) -> int:
    """2 sqrt(n), capped at n - 1."""
    return min(n - 1, math.ceil(2 * math.sqrt(n)))


def default_clique_size(n: int) -> int:
    return min(n, max(3, math.isqrt(n)))


def default_matching_size(n: int) -> int:
    return n // 4
