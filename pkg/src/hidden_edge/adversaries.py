"""Adversaries that answer a fixed query family so that no output is safe.

Both adversaries peel candidate structure away from a family of queries and
then answer every query by whether its residual is empty.  Afterwards
``refute`` produces, for any claimed edge, a graph that agrees with every
answer but does not contain that edge.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph import Edge, FindOutcome, HiddenGraph, Status, VertexSet


def _family_matrix(n: int, family: Sequence[VertexSet]) -> np.ndarray:
    """Boolean (queries x n) membership matrix."""
    out = np.zeros((len(family), n), dtype=bool)
    for i, s in enumerate(family):
        if s.n != n:
            raise ValueError(f"query {i} is over {s.n} vertices, expected {n}")
        out[i, s.members()] = True
    return out


def _as_edge(e) -> Edge:
    return e if isinstance(e, Edge) else Edge(*e)


@dataclass(frozen=True, eq=False)
class GeneralFooling:
    """Outcome of the edge-peeling adversary.

    ``surviving`` is the final edge set E; ``residual_sizes[q]`` counts the
    edges of E inside query q; ``answers[q]`` is True iff that count is positive.
    """

    n: int
    answers: np.ndarray
    surviving: frozenset[Edge]
    residual_sizes: np.ndarray
    peel_order: tuple[Edge, ...]

    @property
    def foolable(self) -> bool:
        return bool(self.surviving)

    def witness(self) -> HiddenGraph:
        """The graph on E itself."""
        return HiddenGraph(self.n, sorted(self.surviving))

    def refute(self, e) -> HiddenGraph:
        """A graph consistent with every answer in which ``e`` is not an edge."""
        e = _as_edge(e)
        return HiddenGraph(self.n, sorted(self.surviving - {e}))

    def defeat(self, outcome: FindOutcome) -> Optional[HiddenGraph]:
        """A consistent graph on which ``outcome`` is wrong, or None."""
        if outcome.is_found:
            return self.refute(outcome.edge)
        if outcome.status is Status.NONE:
            return self.witness() if self.surviving else None
        return self.witness()


class GeneralFoolingAdversary:
    """Accepts one complete family, then answers it; a second family is refused."""

    def __init__(self, n: int) -> None:
        if n < 2:
            raise ValueError("need at least two vertices")
        self.n = n
        self._result: Optional[GeneralFooling] = None

    def answer(self, family: Sequence[VertexSet]) -> GeneralFooling:
        if self._result is not None:
            raise RuntimeError("the adversary answers a single non-adaptive family")
        self._result = _peel_edges(self.n, list(family))
        return self._result


def general_fooling(n: int, family: Sequence[VertexSet]) -> GeneralFooling:
    return GeneralFoolingAdversary(n).answer(family)


def _peel_edges(n: int, family: list[VertexSet]) -> GeneralFooling:
    q = _family_matrix(n, family)
    u, v = np.triu_indices(n, k=1)
    inside = q[:, u] & q[:, v]
    alive = np.ones(u.size, dtype=bool)
    count = inside.sum(axis=1).astype(np.int64)
    heap = [int(i) for i in np.flatnonzero(count == 1)]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        if count[i] != 1:
            continue
        p = int(np.flatnonzero(inside[i] & alive)[0])
        alive[p] = False
        order.append(Edge(int(u[p]), int(v[p])))
        hit = inside[:, p]
        count[hit] -= 1
        for j in np.flatnonzero(hit & (count == 1)):
            heapq.heappush(heap, int(j))
    surviving = frozenset(Edge(int(a), int(b)) for a, b in zip(u[alive], v[alive]))
    count.setflags(write=False)
    answers = count > 0
    answers.setflags(write=False)
    return GeneralFooling(n, answers, surviving, count, tuple(order))


# ------------------------------------------------------------------ clique


@dataclass(frozen=True, eq=False)
class CliqueFooling:
    """Outcome of the vertex-peeling adversary: ``clique`` is the surviving set C."""

    n: int
    answers: np.ndarray
    clique: frozenset[int]
    residual_sizes: np.ndarray

    def witness(self) -> HiddenGraph:
        return _clique_graph(self.n, self.clique)

    def refute(self, e) -> HiddenGraph:
        e = _as_edge(e)
        if e.u in self.clique and e.v in self.clique:
            return _clique_graph(self.n, self.clique - {e.u})
        return self.witness()

    def defeat(self, outcome: FindOutcome) -> Optional[HiddenGraph]:
        if outcome.is_found:
            return self.refute(outcome.edge)
        return self.witness() if len(self.clique) >= 2 else None


def clique_query_limit(n: int) -> int:
    """Largest family size the adversary accepts: floor(n/2) - 1."""
    return n // 2 - 1


def _clique_graph(n: int, members) -> HiddenGraph:
    m = sorted(members)
    return HiddenGraph(n, [(a, b) for i, a in enumerate(m) for b in m[i + 1 :]])


def clique_fooling(n: int, family: Sequence[VertexSet]) -> CliqueFooling:
    """Peel queries whose residual inside C has one or two vertices, lowest index first."""
    family = list(family)
    if 2 * len(family) > n - 2:
        raise ValueError(f"{len(family)} queries exceed the limit of {clique_query_limit(n)} for n={n}")
    q = _family_matrix(n, family)
    alive = np.ones(n, dtype=bool)
    while True:
        sizes = (q & alive).sum(axis=1)
        small = np.flatnonzero((sizes == 1) | (sizes == 2))
        if small.size == 0:
            break
        alive &= ~q[int(small[0])]
    sizes = (q & alive).sum(axis=1).astype(np.int64)
    sizes.setflags(write=False)
    answers = sizes > 0
    answers.setflags(write=False)
    return CliqueFooling(n, answers, frozenset(int(x) for x in np.flatnonzero(alive)), sizes)


# -------------------------------------------------------------- hard stars


def hard_star_probability(n: int) -> float:
    return 1.0 / math.log2(n)


def hard_star_sample(n: int, rng: np.random.Generator) -> HiddenGraph:
    """Uniform centre; every other vertex joins it independently with probability 1/log2 n."""
    if n < 4:
        raise ValueError("hard stars need n >= 4")
    center = int(rng.integers(n))
    others = np.delete(np.arange(n), center)
    leaves = others[rng.random(n - 1) < hard_star_probability(n)]
    lo = np.minimum(leaves, center)
    hi = np.maximum(leaves, center)
    return HiddenGraph(n, np.stack([lo, hi], axis=1))
