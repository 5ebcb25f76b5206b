"""Adaptive drivers that trade rounds for queries.

Each driver works on a shrinking working set of real vertices.  A round on
a partition asks about unions of blocks; the session evaluates those through
a contracted adjacency, so one query costs the same as any other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .general import (
    GeneralPlanConfig,
    all_pairs_batch,
    build_general_plan,
    decode_general,
    first_pair_hit,
    pair_batch,
    run_general,
)
from .graph import NONE, FindOutcome, VertexSet
from .oracle import OracleSession
from .plan import RoundPlan


def _ceil_root_scaled(n: int, r: int, scale: int) -> int:
    """Smallest integer K with K^r >= scale^r * n, i.e. ceil(scale * n^(1/r))."""
    target = scale**r * n
    k = max(0, math.ceil(scale * n ** (1.0 / r)))
    while k > 0 and (k - 1) ** r >= target:
        k -= 1
    while k**r < target:
        k += 1
    return k


def partition_size(n: int, r: int) -> int:
    """k = ceil(2 n^(1/r)) + 4."""
    if r < 1:
        raise ValueError("r must be at least 1")
    return _ceil_root_scaled(n, r, 2) + 4


def partition_cap(n: int, r: int) -> int:
    """t = floor(n^(1 - 1/r) / 2), the nominal block-size cap."""
    if r < 1:
        raise ValueError("r must be at least 1")
    # largest T with (2T)^r <= n^(r-1)
    t = int(n ** (1.0 - 1.0 / r) / 2)
    while t > 0 and (2 * t) ** r > n ** (r - 1):
        t -= 1
    while (2 * (t + 1)) ** r <= n ** (r - 1):
        t += 1
    return t


@dataclass(frozen=True, eq=False)
class Partition:
    """Round-robin split of a working set into ``k`` blocks."""

    n: int
    blocks: tuple[np.ndarray, ...]
    k: int
    t: int

    @classmethod
    def build(cls, n: int, vertices: Sequence[int], r: int) -> "Partition":
        vertices = np.asarray(vertices, dtype=np.int64)
        m = vertices.size
        k = partition_size(m, r)
        blocks = tuple(vertices[i::k] for i in range(min(k, m)))
        return cls(n, blocks, k, partition_cap(m, r))

    @property
    def max_block(self) -> int:
        return max((b.size for b in self.blocks), default=0)

    def contract(self, super_set: Iterable[int]) -> VertexSet:
        return contract_query([VertexSet.of(self.n, b.tolist()) for b in self.blocks], super_set, self.n)


def contract_query(blocks: Sequence[VertexSet], super_set: Iterable[int], n: Optional[int] = None) -> VertexSet:
    """Union of the selected blocks."""
    if n is None:
        if not blocks:
            raise ValueError("n is needed when there are no blocks")
        n = blocks[0].n
    bits = 0
    for i in super_set:
        if not 0 <= i < len(blocks):
            raise IndexError(f"block index {i} outside [0, {len(blocks)})")
        bits |= blocks[i].bits
    return VertexSet(n, bits)


def det_rounds_budget(n: int, r: int) -> float:
    return 10 * r * n ** (2.0 / r)


def rand_rounds_budget(n: int, r: int, c: float) -> float:
    return 2000 * c * r * n ** (1.0 / r) * math.log(n) ** 3 if n > 1 else 0.0


def _next_round(session: OracleSession, plan: RoundPlan):
    return session.submit_round(plan.for_round(session.rounds_used + 1))


def _all_pairs_round(session: OracleSession, vertices: np.ndarray) -> FindOutcome:
    if vertices.size < 2:
        return NONE
    u, v = np.triu_indices(vertices.size, k=1)
    batch = pair_batch("PAIRS", vertices[u], vertices[v])
    answers = _next_round(session, RoundPlan(session.n, (batch,)))
    return first_pair_hit(batch, answers.values) or NONE


def _binary_search_applies(m: int, r: int) -> bool:
    return m > 2 and 2**r >= m


def binary_search_rounds(m: int) -> int:
    """Rounds used on a working set of ``m`` vertices."""
    if m < 2:
        return 0
    return max(1, (m - 1).bit_length() - 1)


# ----------------------------------------------------------- binary search


def run_binary_search(session: OracleSession, vertices: Optional[Sequence[int]] = None) -> FindOutcome:
    """Four-way splitting with at most 6 queries per round.

    The working set is padded to a power of two with dummy positions that
    never reach the oracle.  Queries whose real part has fewer than two
    vertices are known to be negative and are not asked.
    """
    w = np.arange(session.n) if vertices is None else np.asarray(vertices, dtype=np.int64)
    if w.size < 2:
        return NONE
    size = 1 << (w.size - 1).bit_length()
    while size > 4:
        quarter = size // 4
        parts = [w[i * quarter : (i + 1) * quarter] for i in range(4)]
        pairs = [(i, j) for i, j in combinations(range(4), 2) if parts[i].size + parts[j].size >= 2]
        groups = tuple(parts)
        i_idx = np.array([p[0] for p in pairs], dtype=np.int64)
        j_idx = np.array([p[1] for p in pairs], dtype=np.int64)
        batch = pair_batch("SPLIT", i_idx, j_idx)
        answers = _next_round(session, RoundPlan(session.n, (batch,), groups=groups)).values
        hits = np.flatnonzero(answers)
        if hits.size == 0:
            # every edge lies inside some pair of quarters
            return NONE
        i, j = pairs[int(hits[0])]
        w = np.concatenate([parts[i], parts[j]])
        size //= 2
    return _all_pairs_round(session, w)


# ---------------------------------------------------------- deterministic


def run_det_rounds(session: OracleSession, r: int, vertices: Optional[Sequence[int]] = None) -> FindOutcome:
    """At most ``r`` rounds and 10 r n^(2/r) queries."""
    if r < 1:
        raise ValueError("r must be at least 1")
    w = np.arange(session.n) if vertices is None else np.asarray(vertices, dtype=np.int64)
    m = w.size
    if m < 2:
        return NONE
    if r == 1:
        return _all_pairs_round(session, w)
    if _binary_search_applies(m, r):
        return run_binary_search(session, w)
    part = Partition.build(session.n, w, r)
    k = len(part.blocks)
    if k >= m or m * (m - 1) <= k * (k - 1):
        return _all_pairs_round(session, w)
    plan = RoundPlan(session.n, (all_pairs_batch("BLOCK_PAIRS", k),), groups=part.blocks)
    batch = plan.batches[0]
    answers = _next_round(session, plan).values
    hits = np.flatnonzero(answers)
    if hits.size == 0:
        return NONE
    i, j = (int(x) for x in batch.block_base(int(hits[0])))
    union = np.sort(np.concatenate([part.blocks[i], part.blocks[j]]))
    return run_det_rounds(session, r - 1, union)


# -------------------------------------------------------------- randomized


def run_general_on(session: OracleSession, vertices: np.ndarray, c: float, rng: np.random.Generator) -> FindOutcome:
    """The one-round randomized finder restricted to ``vertices``."""
    m = vertices.size
    if m < 2:
        return NONE
    plan = build_general_plan(GeneralPlanConfig(m, c), rng)
    answers = _next_round(session, plan.round.relabel(vertices, session.n))
    out = decode_general(plan, answers.values)
    if out.is_found:
        return FindOutcome.found(int(vertices[out.edge.u]), int(vertices[out.edge.v]))
    return out


def run_rand_rounds(
    session: OracleSession,
    r: int,
    c: float,
    rng: np.random.Generator,
    vertices: Optional[Sequence[int]] = None,
) -> FindOutcome:
    """Randomized r-round finder: the one-round algorithm on the partition graph, then recurse."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if not c > 0:
        raise ValueError("c must be positive")
    top = vertices is None
    w = np.arange(session.n) if top else np.asarray(vertices, dtype=np.int64)
    m = w.size
    if m < 2:
        return NONE
    if r == 1:
        if top:
            return run_general(session, c, rng)
        return run_general_on(session, w, c, rng)
    if _binary_search_applies(m, r):
        return run_binary_search(session, w)
    part = Partition.build(session.n, w, r)
    k = len(part.blocks)
    if k >= m or m * (m - 1) <= k * (k - 1):
        return _all_pairs_round(session, w)
    plan = build_general_plan(GeneralPlanConfig(k, c), rng)
    answers = _next_round(session, plan.round.with_groups(part.blocks, session.n))
    out = decode_general(plan, answers.values)
    if not out.is_found:
        return out
    union = np.sort(np.concatenate([part.blocks[out.edge.u], part.blocks[out.edge.v]]))
    return run_rand_rounds(session, r - 1, c, rng, union)
