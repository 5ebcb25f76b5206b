"""Single-edge finders: randomized sampling, explicit GF(2^k) labels, known endpoint.

Each scheme lays out one block: a base list of vertices plus one row per
query.  Block layouts (row order) are:

* randomized: row 0 is the whole target, rows 1..t are T_1/2 samples with
  t = ceil(24 ln |S|).
* explicit: row 0 is the whole target; row 1 + 2i + b holds the members whose
  label has bit i equal to b; row 1 + 2k + 2i + b does the same for the
  inverse label.  Labels are 1..|S| in base order.
* known endpoint: base[0] is the anchor v, base[1:] the target.  Row 2i + b is
  v plus the members whose index has bit i equal to b.  A one-member target
  gets the single row {v, member}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import gf2k
from .graph import MORE_THAN_ONE, NONE, UNDETERMINED, FindOutcome, VertexSet, iter_bits
from .plan import QueryBatch, RoundPlan, pack_rows, words_for

RANDOMIZED = "randomized"
EXPLICIT = "explicit"
KNOWN_ENDPOINT = "known_endpoint"
# known-endpoint rows plus a final row holding the target alone
KNOWN_ENDPOINT_GUARDED = "known_endpoint_guarded"

_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def sample_count(size: int) -> int:
    """ceil(24 ln size) random sets for a target of ``size`` vertices."""
    return math.ceil(24 * math.log(size)) if size >= 2 else 0


def known_endpoint_bits(size: int) -> int:
    """Index bits for a target of ``size`` >= 2 members: ceil(log2 size)."""
    return (size - 1).bit_length()


def known_endpoint_rows(size: int) -> int:
    if size <= 0:
        return 0
    return 1 if size == 1 else 2 * known_endpoint_bits(size)


def guarded_rows(size: int) -> int:
    """Known-endpoint rows plus one guard row when the target can hold an edge."""
    return known_endpoint_rows(size) + (size >= 2)


@dataclass(frozen=True, eq=False)
class SingleEdgePlan:
    """One single-edge sub-plan over ``target`` (plus ``anchor`` for the known-endpoint scheme)."""

    n: int
    target: VertexSet
    scheme: str
    batch: QueryBatch
    anchor: Optional[int] = None
    field_degree: Optional[int] = None

    @property
    def num_queries(self) -> int:
        return self.batch.num_queries

    @property
    def label_map(self) -> dict[int, gf2k.FieldElement]:
        if self.scheme != EXPLICIT:
            return {}
        return {v: gf2k.FieldElement(i + 1, self.field_degree) for i, v in enumerate(self.target)}

    @property
    def queries(self) -> list[VertexSet]:
        base = self.batch.block_base(0)
        out = []
        for row in self.batch.block_rows(0):
            out.append(VertexSet.of(self.n, (int(base[i]) for i in iter_bits(row))))
        return out

    def round(self, round_index: int = 1) -> RoundPlan:
        return RoundPlan(self.n, (self.batch,), round_index=round_index)


def _target_members(s: VertexSet, minimum: int) -> list[int]:
    members = s.members()
    if len(members) < minimum:
        raise ValueError(f"target needs at least {minimum} vertices, got {len(members)}")
    return members


def _answers(plan: SingleEdgePlan, answers) -> np.ndarray:
    ans = np.asarray([a for _, a in answers] if _is_pairs(answers) else answers, dtype=bool).reshape(-1)
    if ans.size != plan.num_queries:
        raise ValueError(f"{ans.size} answers for a plan of {plan.num_queries} queries")
    return ans


def _is_pairs(answers) -> bool:
    return isinstance(answers, list) and bool(answers) and isinstance(answers[0], tuple)


# ---------------------------------------------------------------- randomized


def build_randomized(s: VertexSet, rng: np.random.Generator) -> SingleEdgePlan:
    members = _target_members(s, 2)
    batch = randomized_batch("single_edge", np.asarray(members), np.array([0, len(members)]), rng)
    return SingleEdgePlan(s.n, s, RANDOMIZED, batch)


def randomized_batch(tag: str, members: np.ndarray, offsets: np.ndarray, rng: np.random.Generator, meta=None) -> QueryBatch:
    """Randomized sub-plans for many targets at once.

    ``members[offsets[b]:offsets[b+1]]`` is the target of block b.  Targets
    with fewer than two vertices keep their base but get no rows.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    sizes = np.diff(offsets)
    ws = words_for(sizes)
    table = _sample_count_table(int(sizes.max()) if sizes.size else 0)
    rows = np.where(sizes >= 2, 1 + table[sizes], 0)
    wpb = rows * ws
    moff = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(wpb, out=moff[1:])
    total = int(moff[-1])
    masks = np.asarray(rng.bit_generator.random_raw(total), dtype=np.uint64) if total else np.zeros(0, np.uint64)
    if total:
        tail = sizes - 64 * (ws - 1)
        tail_mask = np.where(tail >= 64, _ALL, (np.uint64(1) << np.minimum(tail, 63).astype(np.uint64)) - np.uint64(1))
        first_word = moff[:-1][rows > 0]
        if np.all(ws[rows > 0] == 1):
            masks &= np.repeat(tail_mask, rows)
            masks[first_word] = tail_mask[rows > 0]
        else:
            blk = np.repeat(np.arange(sizes.size), wpb)
            local = np.arange(total) - moff[blk]
            wrep = ws[blk]
            row = local // wrep
            word = local - row * wrep
            valid = np.where(word == wrep - 1, tail_mask[blk], _ALL)
            masks &= valid
            first = row == 0
            masks[first] = valid[first]
    return QueryBatch(tag, RANDOMIZED, members, offsets, masks, moff, meta or {})


@lru_cache(maxsize=8)
def _sample_count_table(max_size: int) -> np.ndarray:
    t = np.array([sample_count(s) for s in range(max(max_size, 2) + 1)], dtype=np.int64)
    t.setflags(write=False)
    return t


def decode_randomized(plan: SingleEdgePlan, answers) -> FindOutcome:
    ans = _answers(plan, answers)
    return decode_randomized_block(plan.batch.block_base(0), plan.batch.block_rows(0), ans)


def decode_randomized_block(base: Sequence[int], rows: Sequence[int], ans) -> FindOutcome:
    """Consistent-pair decoding of one randomized block.

    A pair survives if it lies inside every positive sample and no negative
    sample contains both of its endpoints.
    """
    if len(rows) == 0 or not ans[0]:
        return NONE
    inter = rows[0]
    negative = []
    for row, a in zip(rows[1:], ans[1:]):
        if a:
            inter &= row
        else:
            negative.append(row)
    found = None
    for a in iter_bits(inter):
        cover = 0
        for row in negative:
            if row >> a & 1:
                cover |= row
        partners = inter & ~cover & ~((2 << a) - 1)
        while partners:
            low = partners & -partners
            b = low.bit_length() - 1
            if found is not None:
                return UNDETERMINED
            found = (a, b)
            partners ^= low
    if found is None:
        return MORE_THAN_ONE
    return FindOutcome.found(int(base[found[0]]), int(base[found[1]]))


# ------------------------------------------------------------------ explicit


def build_explicit(s: VertexSet) -> SingleEdgePlan:
    members = _target_members(s, 2)
    size = len(members)
    k = gf2k.degree_for(size)
    labels = np.arange(1, size + 1, dtype=np.int64)
    inverses = gf2k.inverse_table(k)[labels]
    bits = np.arange(k, dtype=np.int64)[:, None]
    fl = (labels[None, :] >> bits) & 1
    hl = (inverses[None, :] >> bits) & 1
    layout = np.empty((1 + 4 * k, size), dtype=bool)
    layout[0] = True
    layout[1 : 1 + 2 * k : 2] = fl == 0
    layout[2 : 2 + 2 * k : 2] = fl == 1
    layout[1 + 2 * k :: 2] = hl == 0
    layout[2 + 2 * k :: 2] = hl == 1
    words = pack_rows(layout)
    batch = QueryBatch(
        "single_edge",
        EXPLICIT,
        np.asarray(members),
        np.array([0, size]),
        words.reshape(-1),
        np.array([0, words.size]),
    )
    return SingleEdgePlan(s.n, s, EXPLICIT, batch, field_degree=k)


def _xor_bits(ans: np.ndarray, k: int) -> Optional[int]:
    """Bit i is 0 when exactly one of the pair is positive, 1 when neither is."""
    value = 0
    for i in range(k):
        p0, p1 = bool(ans[2 * i]), bool(ans[2 * i + 1])
        if p0 and p1:
            return None
        if not (p0 or p1):
            value |= 1 << i
    return value


def decode_explicit(plan: SingleEdgePlan, answers) -> FindOutcome:
    ans = _answers(plan, answers)
    k = plan.field_degree
    base = plan.batch.block_base(0)
    size = base.size
    if not ans[0]:
        return NONE
    a = _xor_bits(ans[1 : 1 + 2 * k], k)
    b = _xor_bits(ans[1 + 2 * k :], k)
    if not a or not b:
        return MORE_THAN_ONE
    product = gf2k.mul_bits(a, gf2k.inv_bits(b, k), k)
    xs = np.arange(1, size + 1, dtype=np.int64)
    ys = xs ^ a
    ok = (ys >= 1) & (ys <= size) & (xs < ys)
    xs, ys = xs[ok], ys[ok]
    hits = np.flatnonzero(gf2k.mul_array(xs, ys, k) == product)
    if hits.size != 1:
        return MORE_THAN_ONE
    x, y = int(xs[hits[0]]), int(ys[hits[0]])
    if not np.array_equal(ans, _explicit_pattern(x, y, k)):
        return MORE_THAN_ONE
    return FindOutcome.found(int(base[x - 1]), int(base[y - 1]))


def _explicit_pattern(x: int, y: int, k: int) -> np.ndarray:
    """Answers a single edge between labels x and y would produce."""
    out = np.zeros(1 + 4 * k, dtype=bool)
    out[0] = True
    ix, iy = gf2k.inv_bits(x, k), gf2k.inv_bits(y, k)
    for i in range(k):
        for b in (0, 1):
            out[1 + 2 * i + b] = (x >> i & 1) == b and (y >> i & 1) == b
            out[1 + 2 * k + 2 * i + b] = (ix >> i & 1) == b and (iy >> i & 1) == b
    return out


# ------------------------------------------------------------ known endpoint


def build_known_endpoint(s: VertexSet, v: int) -> SingleEdgePlan:
    if v in s:
        raise ValueError(f"anchor {v} must not belong to the target")
    if not 0 <= v < s.n:
        raise ValueError(f"anchor {v} outside [0, {s.n})")
    members = _target_members(s, 1)
    batch = known_endpoint_batch("single_edge", np.array([v]), np.asarray(members), np.array([0, len(members)]))
    return SingleEdgePlan(s.n, s, KNOWN_ENDPOINT, batch, anchor=v)


@lru_cache(maxsize=None)
@lru_cache(maxsize=None)
def _known_endpoint_table(size: int, guard: bool = False) -> np.ndarray:
    """Flat mask words of the known-endpoint rows for a target of ``size``."""
    if size == 0:
        return np.zeros(0, dtype=np.uint64)
    if size == 1:
        layout = np.ones((1, 2), dtype=bool)
    else:
        nbits = known_endpoint_bits(size)
        idx = np.arange(size)
        layout = np.zeros((2 * nbits + guard, size + 1), dtype=bool)
        layout[: 2 * nbits, 0] = True
        for i in range(nbits):
            bit = (idx >> i) & 1
            layout[2 * i, 1:] = bit == 0
            layout[2 * i + 1, 1:] = bit == 1
        if guard:
            layout[-1, 1:] = True
    words = pack_rows(layout).reshape(-1)
    words.setflags(write=False)
    return words


@lru_cache(maxsize=8)
def _known_endpoint_layout(max_size: int, guard: bool = False):
    """All per-size tables concatenated, with their start offsets and lengths."""
    tables = [_known_endpoint_table(s, guard) for s in range(max_size + 1)]
    lengths = np.array([t.size for t in tables], dtype=np.int64)
    starts = np.zeros(max_size + 2, dtype=np.int64)
    np.cumsum(lengths, out=starts[1:])
    return np.concatenate(tables), starts[:-1], lengths


def known_endpoint_batch(
    tag: str,
    anchors: np.ndarray,
    members: np.ndarray,
    offsets: np.ndarray,
    meta=None,
    owner=None,
    guard: bool = False,
) -> QueryBatch:
    """Known-endpoint sub-plans: block b is anchor ``anchors[b]`` plus its target slice.

    ``owner`` (optional) is the block index of each member, if already known.
    With ``guard`` every block whose target has two or more members also asks
    the target alone, so a decode is trusted only when the target is independent.
    """
    anchors = np.asarray(anchors, dtype=np.int64)
    members = np.asarray(members, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    sizes = np.diff(offsets)
    nb = sizes.size
    boff = offsets + np.arange(nb + 1)
    bases = np.empty(int(boff[-1]), dtype=np.int32)
    if owner is None:
        owner = np.repeat(np.arange(nb), sizes)
    bases[np.arange(members.size) + owner + 1] = members
    bases[boff[:-1]] = anchors
    flat, starts, lengths = _known_endpoint_layout(int(sizes.max()) if nb else 0, guard)
    wpb = lengths[sizes]
    moff = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(wpb, out=moff[1:])
    total = int(moff[-1])
    src = np.arange(total, dtype=np.int64) + np.repeat(starts[sizes] - moff[:-1], wpb)
    masks = flat[src]
    kind = KNOWN_ENDPOINT_GUARDED if guard else KNOWN_ENDPOINT
    return QueryBatch(tag, kind, bases, boff, masks, moff, meta or {})


def decode_known_endpoint(plan: SingleEdgePlan, answers) -> FindOutcome:
    return decode_known_endpoint_block(plan.batch.block_base(0), _answers(plan, answers))


def decode_known_endpoint_block(base: Sequence[int], ans, guard: bool = False) -> FindOutcome:
    """Read the neighbour's index bit by bit; both halves positive means two neighbours.

    With ``guard`` the last answer is the target alone.  If it is positive the
    rows may be lit by edges that avoid the anchor, so nothing is claimed.
    """
    size = len(base) - 1
    if guard and size >= 2:
        if ans[-1]:
            return MORE_THAN_ONE
        ans = ans[:-1]
    if size <= 0 or not np.any(ans):
        return NONE
    if size == 1:
        return FindOutcome.found(int(base[0]), int(base[1]))
    idx = 0
    for i in range(known_endpoint_bits(size)):
        p0, p1 = bool(ans[2 * i]), bool(ans[2 * i + 1])
        if p0 == p1:
            return MORE_THAN_ONE
        if p1:
            idx |= 1 << i
    if idx >= size:
        return MORE_THAN_ONE
    return FindOutcome.found(int(base[0]), int(base[1 + idx]))
