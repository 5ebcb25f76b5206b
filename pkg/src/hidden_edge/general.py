"""One-round randomized edge finder for arbitrary graphs.

The round is the union of three families:

* F1: ceil(c (n+1) ln n) uniformly random vertex pairs, for dense graphs.
* F2: for every vertex v and every degree guess d, ceil(4 c e^2 ln n) samples
  of T_1/d(V - v), each probed with a known-endpoint sub-plan anchored at v
  and one guard query on the sample alone.
* F3: ceil(2 c e^2 n ln n) samples of T_1/sqrt(n)(V), each probed with a
  randomized single-edge sub-plan.

Decoding scans F1, then F2, then F3 in plan order and returns the first edge
whose answer pattern verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import NONE, FindOutcome
from .oracle import OracleSession
from .plan import QueryBatch, RoundPlan
from .sampling import sample_blocks
from .single_edge import (
    KNOWN_ENDPOINT,
    KNOWN_ENDPOINT_GUARDED,
    decode_known_endpoint_block,
    decode_randomized_block,
    known_endpoint_batch,
    randomized_batch,
)

ALPHA = 500
EXHAUSTIVE_MAX_N = 8
PAIRS = "pairs"


@dataclass(frozen=True)
class GeneralPlanConfig:
    n: int
    c: float = 1.0
    alpha: float = ALPHA

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.c > 0:
            raise ValueError("c must be positive")

    @property
    def budget(self) -> float:
        """c * alpha * n * log2(n)^3."""
        return self.c * self.alpha * self.n * math.log2(self.n) ** 3 if self.n > 1 else 0.0

    @property
    def f1_size(self) -> int:
        return math.ceil(self.c * (self.n + 1) * math.log(self.n))

    @property
    def f2_blocks_per_pair(self) -> int:
        return math.ceil(4 * self.c * math.e**2 * math.log(self.n))

    @property
    def f3_blocks(self) -> int:
        return math.ceil(2 * self.c * math.e**2 * self.n * math.log(self.n))


def degree_estimates(n: int) -> list[float]:
    """Sampling denominators 2^i * sqrt(n) for i = 1 .. floor(log2(n) / 2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    top = (n.bit_length() - 1) // 2
    root = math.sqrt(n)
    return [2**i * root for i in range(1, top + 1)]


def pair_batch(tag: str, u: np.ndarray, v: np.ndarray) -> QueryBatch:
    """One block per pair, each asking exactly that pair."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    bases = np.stack([lo, hi], axis=1).reshape(-1)
    k = lo.size
    return QueryBatch(
        tag,
        PAIRS,
        bases,
        np.arange(k + 1, dtype=np.int64) * 2,
        np.full(k, 3, dtype=np.uint64),
        np.arange(k + 1, dtype=np.int64),
    )


def all_pairs_batch(tag: str, n: int) -> QueryBatch:
    u, v = np.triu_indices(n, k=1)
    return pair_batch(tag, u, v)


@dataclass(frozen=True, eq=False)
class GeneralPlan:
    config: GeneralPlanConfig
    round: RoundPlan

    @property
    def exhaustive(self) -> bool:
        return self.round.batches[0].tag == "ALL"

    @property
    def num_queries(self) -> int:
        return self.round.num_queries

    @property
    def f1(self) -> np.ndarray:
        """F1 pairs as an ``(k, 2)`` array."""
        return self.round.batch("F1").bases.reshape(-1, 2)

    @property
    def f2(self) -> QueryBatch:
        return self.round.batch("F2")

    @property
    def f3(self) -> QueryBatch:
        return self.round.batch("F3")


def build_general_plan(cfg: GeneralPlanConfig, rng: np.random.Generator) -> GeneralPlan:
    n = cfg.n
    if n < 2:
        raise ValueError("the general plan needs n >= 2")
    if n <= EXHAUSTIVE_MAX_N:
        return GeneralPlan(cfg, RoundPlan(n, (all_pairs_batch("ALL", n),)))

    k1 = cfg.f1_size
    u = rng.integers(0, n, size=k1)
    v = rng.integers(0, n - 1, size=k1)
    v = v + (v >= u)
    f1 = pair_batch("F1", u, v)

    per = cfg.f2_blocks_per_pair
    parts_members, parts_owner, parts_sizes = [], [], []
    estimates = degree_estimates(n)
    for i, d in enumerate(estimates):
        members, offsets, block = sample_blocks(n * per, n - 1, 1.0 / d, rng)
        members += members >= block // per
        parts_members.append(members)
        parts_owner.append(block + i * n * per)
        parts_sizes.append(np.diff(offsets))
    if estimates:
        sizes = np.concatenate(parts_sizes)
        offsets = np.zeros(sizes.size + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        a = np.tile(np.repeat(np.arange(n), per), len(estimates))
        f2 = known_endpoint_batch(
            "F2",
            a,
            np.concatenate(parts_members),
            offsets,
            meta={"v": a, "d_index": np.repeat(np.arange(1, len(estimates) + 1), n * per)},
            owner=np.concatenate(parts_owner),
            guard=True,
        )
    else:
        f2 = known_endpoint_batch("F2", np.zeros(0), np.zeros(0), np.zeros(1), guard=True)

    members, offsets, _ = sample_blocks(cfg.f3_blocks, n, 1.0 / math.sqrt(n), rng)
    f3 = randomized_batch("F3", members, offsets, rng)
    return GeneralPlan(cfg, RoundPlan(n, (f1, f2, f3)))


def _aligned(plan: RoundPlan, answers) -> np.ndarray:
    ans = np.asarray(getattr(answers, "values", answers), dtype=bool).reshape(-1)
    if ans.size != plan.num_queries:
        raise ValueError(f"{ans.size} answers for a plan of {plan.num_queries} queries")
    return ans


def first_pair_hit(batch: QueryBatch, ans: np.ndarray) -> Optional[FindOutcome]:
    hits = np.flatnonzero(ans)
    if hits.size == 0:
        return None
    b, _ = batch.block_of_query(int(hits[0]))
    base = batch.block_base(b)
    return FindOutcome.found(int(base[0]), int(base[1]))


def positive_blocks(batch: QueryBatch, ans: np.ndarray) -> np.ndarray:
    """Blocks with at least one positive answer, in plan order."""
    qoff = batch.query_offsets
    cum = np.zeros(ans.size + 1, dtype=np.int64)
    np.cumsum(ans, out=cum[1:])
    return np.flatnonzero(cum[qoff[1:]] > cum[qoff[:-1]])


def scan_known_endpoint(batch: QueryBatch, ans: np.ndarray) -> Optional[FindOutcome]:
    qoff = batch.query_offsets
    guard = batch.kind == KNOWN_ENDPOINT_GUARDED
    for b in positive_blocks(batch, ans):
        out = decode_known_endpoint_block(batch.block_base(b), ans[qoff[b] : qoff[b + 1]], guard)
        if out.is_found:
            return out
    return None


def scan_randomized(batch: QueryBatch, ans: np.ndarray) -> Optional[FindOutcome]:
    qoff = batch.query_offsets
    has_rows = np.flatnonzero(qoff[1:] > qoff[:-1])
    for b in has_rows[ans[qoff[has_rows]]]:
        out = decode_randomized_block(batch.block_base(b), batch.block_rows(b), ans[qoff[b] : qoff[b + 1]])
        if out.is_found:
            return out
    return None


def decode_round(plan: RoundPlan, answers) -> FindOutcome:
    """First verified edge over the batches of ``plan``, in order.

    Works for any plan assembled from pair, known-endpoint and randomized
    batches; used by the general and the randomized family decoders.
    """
    ans = _aligned(plan, answers)
    off = plan.batch_offsets
    for i, batch in enumerate(plan.batches):
        a = ans[off[i] : off[i + 1]]
        if batch.kind == PAIRS:
            out = first_pair_hit(batch, a)
        elif batch.kind in (KNOWN_ENDPOINT, KNOWN_ENDPOINT_GUARDED):
            out = scan_known_endpoint(batch, a)
        else:
            out = scan_randomized(batch, a)
        if out is not None:
            return out
    return NONE


def decode_general(plan: GeneralPlan, answers) -> FindOutcome:
    return decode_round(plan.round, answers)


def run_general(session: OracleSession, c: float, rng: np.random.Generator) -> FindOutcome:
    """Build, submit and decode the one-round plan on ``session``."""
    if session.n < 2:
        return NONE
    plan = build_general_plan(GeneralPlanConfig(session.n, c), rng)
    answers = session.submit_round(plan.round.for_round(session.rounds_used + 1))
    return decode_general(plan, answers)
