"""Edge finders specialised to structured graph families.

All builders return single-round plans that never look at answers.

* Overlapping product (edges A x B minus loops, stars included): recursive
  halving, n * ceil(log n) queries.
* Clique: prefixes and suffixes locate the second smallest and second largest
  clique vertices; a verified auxiliary family settles 3-cliques.  3n queries.
* Matching: recursive halving with known-endpoint sub-plans across the cut.
* Randomized clique / matching: ladders of T_p samples wrapped in randomized
  single-edge sub-plans.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .general import decode_round
from .graph import NONE, UNDETERMINED, FindOutcome, Status
from .oracle import OracleSession
from .plan import QueryBatch, RoundPlan, pack_rows
from .rng import make_rng
from .sampling import sample_blocks
from .single_edge import (
    decode_known_endpoint_block,
    known_endpoint_batch,
    known_endpoint_rows,
    randomized_batch,
)

OVERLAPPING_PRODUCT = "overlapping_product"
CLIQUE_DET = "clique_det"
MATCHING_DET = "matching_det"


class FamilyTag(enum.Enum):
    OVERLAPPING_PRODUCT = "overlapping_product"
    STAR = "star"
    CLIQUE = "clique"
    MATCHING = "matching"

    def within(self, other: "FamilyTag") -> bool:
        """Family inclusion: stars ({c} x B) and cliques (S x S) are overlapping products."""
        if self is other:
            return True
        return other is FamilyTag.OVERLAPPING_PRODUCT and self in (FamilyTag.STAR, FamilyTag.CLIQUE)


def clique_ladder(n: int) -> list[int]:
    """Size guesses 2^i for i = 1 .. ceil(log2 n)."""
    return [2**i for i in range(1, (n - 1).bit_length() + 1)] if n > 1 else []


def matching_ladder(n: int) -> list[int]:
    """Edge-count guesses 2^i for i = 1 .. floor(log2 n)."""
    return [2**i for i in range(1, n.bit_length())] if n > 1 else []


def _check_aligned(plan_round: RoundPlan, answers) -> np.ndarray:
    ans = np.asarray(getattr(answers, "values", answers), dtype=bool).reshape(-1)
    if ans.size != plan_round.num_queries:
        raise ValueError(f"{ans.size} answers for a plan of {plan_round.num_queries} queries")
    return ans


# ------------------------------------------------------------ halving tree


@lru_cache(maxsize=64)
def halving_nodes(n: int) -> tuple[tuple[int, int, int], ...]:
    """Internal nodes ``(lo, mid, hi)`` of the halving tree over ``range(n)``, level order.

    The left half of ``[lo, hi)`` is ``[lo, mid)`` with ``mid - lo = floor(m/2)``.
    """
    out = []
    level = [(0, n)] if n >= 2 else []
    while level:
        nxt = []
        for lo, hi in level:
            mid = lo + (hi - lo) // 2
            out.append((lo, mid, hi))
            for a, b in ((lo, mid), (mid, hi)):
                if b - a >= 2:
                    nxt.append((a, b))
        level = nxt
    return tuple(out)


def _node_index(nodes) -> dict[tuple[int, int], int]:
    return {(lo, hi): i for i, (lo, _, hi) in enumerate(nodes)}


# ------------------------------------------------------ overlapping product


@dataclass(frozen=True, eq=False)
class OverlappingProductPlan:
    n: int
    round: RoundPlan

    @property
    def num_queries(self) -> int:
        return self.round.num_queries


def op_query_bound(n: int) -> int:
    return n * (n - 1).bit_length() if n > 1 else 0


def op_build(n: int) -> OverlappingProductPlan:
    """Node ``[lo, mid, hi)`` asks {v} + right half for each left v, then {v} + left half for each right v."""
    if n < 1:
        raise ValueError("n must be at least 1")
    nodes = halving_nodes(n)
    bases, boff, masks, moff = [], [0], [], [0]
    levels = []
    depth = {(0, n): 0}
    for lo, mid, hi in nodes:
        m = hi - lo
        d = depth[(lo, hi)]
        depth[(lo, mid)] = depth[(mid, hi)] = d + 1
        left = np.arange(m) < mid - lo
        rows = np.zeros((m, m), dtype=bool)
        rows[left] = ~left
        rows[~left] = left
        rows[np.arange(m), np.arange(m)] = True
        bases.append(np.arange(lo, hi))
        boff.append(boff[-1] + m)
        packed = pack_rows(rows).reshape(-1)
        masks.append(packed)
        moff.append(moff[-1] + packed.size)
        levels.append(d)
    batch = QueryBatch(
        "OP",
        OVERLAPPING_PRODUCT,
        np.concatenate(bases) if bases else np.zeros(0, np.int32),
        np.array(boff),
        np.concatenate(masks) if masks else np.zeros(0, np.uint64),
        np.array(moff),
        {"level": np.array(levels, dtype=np.int64)},
    )
    return OverlappingProductPlan(n, RoundPlan(n, (batch,)))


def op_decode(plan: OverlappingProductPlan, answers) -> FindOutcome:
    ans = _check_aligned(plan.round, answers)
    nodes = halving_nodes(plan.n)
    where = _node_index(nodes)
    qoff = plan.round.batches[0].query_offsets

    def solve(lo: int, hi: int) -> FindOutcome:
        if hi - lo < 2:
            return NONE
        i = where[(lo, hi)]
        _, mid, _ = nodes[i]
        outcomes = (solve(lo, mid), solve(mid, hi))
        for out in outcomes:
            if out.is_found:
                return out
        if any(out.status is not Status.NONE for out in outcomes):
            return UNDETERMINED
        a = ans[qoff[i] : qoff[i + 1]]
        k = mid - lo
        left_hits = np.flatnonzero(a[:k])
        right_hits = np.flatnonzero(a[k:])
        if left_hits.size == 0 and right_hits.size == 0:
            return NONE
        if left_hits.size == 0 or right_hits.size == 0:
            return UNDETERMINED
        return FindOutcome.found(lo + int(left_hits[0]), mid + int(right_hits[0]))

    return solve(0, plan.n)


# ------------------------------------------------------------------ clique

CLIQUE_VERIFY_MAX_N = 128
_CLIQUE_TAG = "clique_det/aux"


@dataclass(frozen=True, eq=False)
class CliqueDetPlan:
    """Rows: prefixes {0..i} for i < n, suffixes {i..n-1} for 1 <= i < n, then n + 1 auxiliary sets."""

    n: int
    round: RoundPlan
    aux: np.ndarray
    attempt: int
    verified: bool

    @property
    def num_queries(self) -> int:
        return self.round.num_queries


def _aux_family(n: int, attempt: int) -> np.ndarray:
    rng = make_rng(n, attempt, _CLIQUE_TAG)
    aux = rng.integers(0, 2, size=(n + 1, n), dtype=np.uint8).astype(bool)
    aux.setflags(write=False)
    return aux


def triangles_decodable(aux: np.ndarray) -> bool:
    """True when the auxiliary answers always pin a common edge of every consistent 3-clique.

    For a 3-clique a < b < c the middle vertex b is already known from the
    prefix and suffix answers.  For each b the (a, c) grid is split into
    classes of equal auxiliary answers; a class is harmless iff its members
    share a (edge a-b) or share c (edge b-c).
    """
    q, n = aux.shape
    if n < 3:
        return True
    cols = np.ascontiguousarray(pack_rows(aux.T))
    for b in range(1, n - 1):
        xb = cols[b]
        ca = cols[:b][:, None, :]
        cc = cols[b + 1 :][None, :, :]
        sig = (xb & (ca | cc)) | (~xb & ca & cc)
        sig = sig.reshape(-1, cols.shape[1])
        a_idx = np.repeat(np.arange(b), n - b - 1)
        c_idx = np.tile(np.arange(b + 1, n), b)
        _, cls = np.unique(sig, axis=0, return_inverse=True)
        cls = cls.reshape(-1)
        k = int(cls.max()) + 1
        amin = np.full(k, n)
        amax = np.full(k, -1)
        cmin = np.full(k, n)
        cmax = np.full(k, -1)
        np.minimum.at(amin, cls, a_idx)
        np.maximum.at(amax, cls, a_idx)
        np.minimum.at(cmin, cls, c_idx)
        np.maximum.at(cmax, cls, c_idx)
        if np.any((amin != amax) & (cmin != cmax)):
            return False
    return True


@lru_cache(maxsize=256)
def clique_aux(n: int, max_attempts: int = 64) -> tuple[np.ndarray, int, bool]:
    """Auxiliary family for ``n``: the first verified draw when n is small enough to check."""
    if n > CLIQUE_VERIFY_MAX_N:
        return _aux_family(n, 0), 0, False
    for attempt in range(max_attempts):
        aux = _aux_family(n, attempt)
        if triangles_decodable(aux):
            return aux, attempt, True
    raise RuntimeError(f"no decodable auxiliary family found for n={n}")


def clique_det_build(n: int) -> CliqueDetPlan:
    if n < 1:
        raise ValueError("n must be at least 1")
    aux, attempt, verified = clique_aux(n)
    idx = np.arange(n)
    prefixes = idx[None, :] <= idx[:, None]
    suffixes = idx[None, :] >= idx[1:, None]
    rows = np.concatenate([prefixes, suffixes, aux])
    packed = pack_rows(rows).reshape(-1)
    batch = QueryBatch("CLIQUE", CLIQUE_DET, idx, np.array([0, n]), packed, np.array([0, packed.size]))
    return CliqueDetPlan(n, RoundPlan(n, (batch,)), aux, attempt, verified)


def _monotone(bits: np.ndarray) -> bool:
    """False...False True...True."""
    return bool(np.all(bits[1:] >= bits[:-1]))


def clique_det_decode(plan: CliqueDetPlan, answers) -> FindOutcome:
    ans = _check_aligned(plan.round, answers)
    n = plan.n
    pre = ans[:n]
    suf = ans[n : 2 * n - 1]
    extra = ans[2 * n - 1 :]
    # suffix i (1 <= i < n) sits at position i - 1; the full set doubles as suffix 0
    suf_full = np.concatenate([pre[-1:], suf]) if n else suf
    if not _monotone(pre) or not _monotone(~suf_full):
        return UNDETERMINED
    if not pre.any():
        return NONE if not suf_full.any() else UNDETERMINED
    second_smallest = int(np.argmax(pre))
    second_largest = int(np.flatnonzero(suf_full)[-1])
    if second_smallest != second_largest:
        lo, hi = sorted((second_smallest, second_largest))
        return FindOutcome.found(lo, hi)
    return _decode_triangle(plan.aux, second_smallest, extra)


def _decode_triangle(aux: np.ndarray, b: int, y: np.ndarray) -> FindOutcome:
    """Settle a 3-clique a < b < c from the auxiliary answers."""
    n = aux.shape[1]
    if b == 0 or b == n - 1:
        return UNDETERMINED
    xb = aux[:, b]
    # b in T and negative: a, c both outside T.  b not in T and positive: a, c both inside T.
    outside = xb & ~y
    inside = ~xb & y
    ok = ~(aux[outside].any(axis=0)) & aux[inside].all(axis=0)
    cand_a = np.flatnonzero(ok[:b])
    cand_c = b + 1 + np.flatnonzero(ok[b + 1 :])
    if cand_a.size == 0 or cand_c.size == 0:
        return UNDETERMINED
    xa = aux[:, cand_a][:, :, None]
    xc = aux[:, cand_c][:, None, :]
    pred = (xb[:, None, None] & (xa | xc)) | (~xb[:, None, None] & xa & xc)
    match = np.all(pred == y[:, None, None], axis=0)
    ai, ci = np.nonzero(match)
    if ai.size == 0:
        return UNDETERMINED
    if np.all(ai == ai[0]):
        return FindOutcome.found(int(cand_a[ai[0]]), b)
    if np.all(ci == ci[0]):
        return FindOutcome.found(b, int(cand_c[ci[0]]))
    return UNDETERMINED


# ---------------------------------------------------------------- matching


@dataclass(frozen=True, eq=False)
class MatchingDetPlan:
    n: int
    round: RoundPlan

    @property
    def num_queries(self) -> int:
        return self.round.num_queries


def matching_recurrence(n: int) -> int:
    """f(1) = 0, f(n) = f(ceil(n/2)) + f(floor(n/2)) + floor(n/2) * g(ceil(n/2)).

    g(m) counts known-endpoint queries for an m-vertex target: 2 ceil(log2 m),
    except that a single vertex needs one query.
    """
    return _matching_recurrence(n)


@lru_cache(maxsize=None)
def _matching_recurrence(n: int) -> int:
    if n <= 1:
        return 0
    half, rest = n // 2, n - n // 2
    return _matching_recurrence(rest) + _matching_recurrence(half) + half * known_endpoint_rows(rest)


def matching_structural_count(n: int) -> int:
    """Queries the builder emits, read off the halving tree without materialising the plan."""
    return sum((mid - lo) * known_endpoint_rows(hi - mid) for lo, mid, hi in halving_nodes(n))


def _ranks(counts: np.ndarray) -> np.ndarray:
    """0..c-1 for each count c, concatenated."""
    total = int(counts.sum())
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    return np.arange(total, dtype=np.int64) - starts


def matching_det_build(n: int) -> MatchingDetPlan:
    if n < 1:
        raise ValueError("n must be at least 1")
    nodes = halving_nodes(n)
    if not nodes:
        batch = known_endpoint_batch("MATCH", np.zeros(0), np.zeros(0), np.zeros(1))
        return MatchingDetPlan(n, RoundPlan(n, (batch,)))
    depth = {(0, n): 0}
    node_level = []
    for lo, mid, hi in nodes:
        d = depth[(lo, hi)]
        depth[(lo, mid)] = depth[(mid, hi)] = d + 1
        node_level.append(d)
    lo, mid, hi = (np.array(col, dtype=np.int64) for col in zip(*nodes))
    k = mid - lo
    # one block per left vertex; its members are the node's right half
    anchors = np.repeat(lo, k) + _ranks(k)
    sizes = np.repeat(hi - mid, k)
    offsets = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    members = np.repeat(np.repeat(mid, k), sizes) + _ranks(sizes)
    level = np.repeat(np.array(node_level, dtype=np.int64), k)
    batch = known_endpoint_batch("MATCH", anchors, members, offsets, meta={"level": level, "v": anchors})
    return MatchingDetPlan(n, RoundPlan(n, (batch,)))


def matching_det_decode(plan: MatchingDetPlan, answers) -> FindOutcome:
    """Bottom-up: a node's cross answers are read only once both halves are certified edge-free."""
    ans = _check_aligned(plan.round, answers)
    batch = plan.round.batches[0]
    qoff = batch.query_offsets
    nodes = halving_nodes(plan.n)
    where = _node_index(nodes)
    first_block = np.zeros(len(nodes) + 1, dtype=np.int64)
    np.cumsum([mid - lo for lo, mid, _ in nodes], out=first_block[1:])

    def solve(lo: int, hi: int) -> FindOutcome:
        if hi - lo < 2:
            return NONE
        i = where[(lo, hi)]
        _, mid, _ = nodes[i]
        outcomes = (solve(lo, mid), solve(mid, hi))
        for out in outcomes:
            if out.is_found:
                return out
        if any(out.status is not Status.NONE for out in outcomes):
            return UNDETERMINED
        ambiguous = False
        for b in range(int(first_block[i]), int(first_block[i + 1])):
            out = decode_known_endpoint_block(batch.block_base(b), ans[qoff[b] : qoff[b + 1]])
            if out.is_found:
                return out
            if out.status is not Status.NONE:
                ambiguous = True
        return UNDETERMINED if ambiguous else NONE

    return solve(0, plan.n)


# -------------------------------------------------------------- randomized

CLIQUE_RAND = "clique_rand"
MATCHING_RAND = "matching_rand"


@dataclass(frozen=True, eq=False)
class RandomizedFamilyPlan:
    n: int
    family: str
    ladder: tuple[int, ...]
    samples_per_rung: int
    round: RoundPlan

    @property
    def num_queries(self) -> int:
        return self.round.num_queries


def _ladder_plan(
    tag: str, n: int, ladder: list[int], per: int, probability, rng: np.random.Generator
) -> RoundPlan:
    parts_m, parts_s, rung = [], [], []
    for i, d in enumerate(ladder):
        members, offsets, _ = sample_blocks(per, n, probability(d), rng)
        parts_m.append(members)
        parts_s.append(np.diff(offsets))
        rung.append(np.full(per, d))
    sizes = np.concatenate(parts_s) if parts_s else np.zeros(0, np.int64)
    offsets = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    members = np.concatenate(parts_m) if parts_m else np.zeros(0, np.int64)
    meta = {"d": np.concatenate(rung) if rung else np.zeros(0, np.int64)}
    return RoundPlan(n, (randomized_batch(tag, members, offsets, rng, meta),))


def clique_rand_samples(n: int, c: float) -> int:
    return math.ceil(8 * c * math.e * math.log(n)) if n > 1 else 0


def matching_rand_samples(n: int, c: float) -> int:
    return math.ceil(2 * c * math.e * math.log(n)) if n > 1 else 0


def clique_rand_build(n: int, c: float, rng: np.random.Generator) -> RandomizedFamilyPlan:
    """ceil(8 c e ln n) samples of T_1/d(V) for each d in the clique ladder."""
    if not c > 0:
        raise ValueError("c must be positive")
    ladder = clique_ladder(n)
    per = clique_rand_samples(n, c)
    rnd = _ladder_plan("CLIQUE_RAND", n, ladder, per, lambda d: 1.0 / d, rng)
    return RandomizedFamilyPlan(n, CLIQUE_RAND, tuple(ladder), per, rnd)


def matching_rand_build(n: int, c: float, rng: np.random.Generator) -> RandomizedFamilyPlan:
    """ceil(2 c e ln n) samples of T_1/sqrt(d)(V) for each d in the matching ladder."""
    if not c > 0:
        raise ValueError("c must be positive")
    ladder = matching_ladder(n)
    per = matching_rand_samples(n, c)
    rnd = _ladder_plan("MATCHING_RAND", n, ladder, per, lambda d: 1.0 / math.sqrt(d), rng)
    return RandomizedFamilyPlan(n, MATCHING_RAND, tuple(ladder), per, rnd)


def randomized_family_decode(plan: RandomizedFamilyPlan, answers) -> FindOutcome:
    return decode_round(plan.round, answers)


clique_rand_decode = randomized_family_decode
matching_rand_decode = randomized_family_decode


# ----------------------------------------------------------------- drivers


def run_plan(session: OracleSession, plan, decode) -> FindOutcome:
    """Submit a one-round family plan as the session's next round and decode it."""
    answers = session.submit_round(plan.round.for_round(session.rounds_used + 1))
    return decode(plan, answers)


def run_overlapping_product(session: OracleSession) -> FindOutcome:
    return run_plan(session, op_build(session.n), op_decode)


def run_clique_det(session: OracleSession) -> FindOutcome:
    return run_plan(session, clique_det_build(session.n), clique_det_decode)


def run_matching_det(session: OracleSession) -> FindOutcome:
    return run_plan(session, matching_det_build(session.n), matching_det_decode)


def run_clique_rand(session: OracleSession, c: float, rng: np.random.Generator) -> FindOutcome:
    return run_plan(session, clique_rand_build(session.n, c, rng), randomized_family_decode)


def run_matching_rand(session: OracleSession, c: float, rng: np.random.Generator) -> FindOutcome:
    return run_plan(session, matching_rand_build(session.n, c, rng), randomized_family_decode)


def family_query_bound(name: str, n: int) -> Optional[int]:
    """Exact deterministic ceilings (None for randomized builders)."""
    if name == OVERLAPPING_PRODUCT:
        return op_query_bound(n)
    if name == CLIQUE_DET:
        return 3 * n
    if name == MATCHING_DET:
        return matching_recurrence(n)
    return None
