"""Round plans stored as flat query blocks.

A *block* is a short list of vertices (its base) plus a stack of bitmask rows
over the base positions; each row is one query.  Grouping queries this way lets
the kernels compute the induced adjacency of a base once and reuse it for every
row, and lets decoders work on compact per-block answer slices.

A plan may be expressed over an abstract vertex space.  ``groups`` maps each
abstract vertex to a set of real vertices; a query then stands for the union
of its members' groups.  Without groups the space is the real vertex set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .graph import VertexSet, iter_bits

WORD = 64


def words_for(size):
    """Mask words needed to cover ``size`` positions (0 for an empty base)."""
    return (size + WORD - 1) // WORD


def _readonly(a: np.ndarray, dtype) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QueryBatch:
    """Blocks produced by one sub-scheme.

    ``kind`` tells decoders how the rows of each block are laid out; ``meta``
    holds per-block integer annotations that end up in query tags.
    """

    tag: str
    kind: str
    bases: np.ndarray
    base_offsets: np.ndarray
    masks: np.ndarray
    mask_offsets: np.ndarray
    meta: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", _readonly(self.bases, np.int32))
        object.__setattr__(self, "base_offsets", _readonly(self.base_offsets, np.int64))
        object.__setattr__(self, "masks", _readonly(self.masks, np.uint64))
        object.__setattr__(self, "mask_offsets", _readonly(self.mask_offsets, np.int64))
        object.__setattr__(self, "meta", {k: _readonly(v, np.int64) for k, v in self.meta.items()})
        nb = self.base_offsets.size - 1
        if nb < 0 or self.mask_offsets.size != nb + 1:
            raise ValueError("offset arrays disagree on the block count")
        if self.base_offsets[-1] != self.bases.size or self.mask_offsets[-1] != self.masks.size:
            raise ValueError("offsets do not cover the flat arrays")
        sizes = np.diff(self.base_offsets)
        ws = words_for(sizes)
        nwords = np.diff(self.mask_offsets)
        if np.any(sizes < 0) or np.any(nwords < 0):
            raise ValueError("offsets must be non-decreasing")
        if np.any(nwords[ws == 0] != 0):
            raise ValueError("an empty base cannot carry query rows")
        safe = np.where(ws == 0, 1, ws)
        if np.any(nwords % safe):
            raise ValueError("mask words are not a whole number of rows")
        counts = nwords // safe
        qoff = np.zeros(nb + 1, dtype=np.int64)
        np.cumsum(counts, out=qoff[1:])
        for k, v in self.meta.items():
            if v.size != nb:
                raise ValueError(f"meta column {k!r} has {v.size} entries for {nb} blocks")
        object.__setattr__(self, "_sizes", _readonly(sizes, np.int64))
        object.__setattr__(self, "_ws", _readonly(ws, np.int64))
        object.__setattr__(self, "_qoff", _readonly(qoff, np.int64))

    @property
    def num_blocks(self) -> int:
        return self.base_offsets.size - 1

    @property
    def num_queries(self) -> int:
        return int(self._qoff[-1])

    @property
    def block_sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def query_offsets(self) -> np.ndarray:
        """Index of each block's first query within this batch (length blocks+1)."""
        return self._qoff

    def block_base(self, b: int) -> np.ndarray:
        return self.bases[self.base_offsets[b] : self.base_offsets[b + 1]]

    def block_rows(self, b: int) -> list[int]:
        """Mask rows of block ``b`` as Python ints over its base positions."""
        ws = int(self._ws[b])
        if ws == 0:
            return []
        words = self.masks[self.mask_offsets[b] : self.mask_offsets[b + 1]]
        if ws == 1:
            return [int(w) for w in words]
        raw = words.astype("<u8", copy=False).tobytes()
        step = 8 * ws
        return [int.from_bytes(raw[i : i + step], "little") for i in range(0, len(raw), step)]

    def block_of_query(self, q: int) -> tuple[int, int]:
        b = int(np.searchsorted(self._qoff, q, side="right")) - 1
        return b, q - int(self._qoff[b])

    def query_members(self, q: int) -> list[int]:
        """Members of query ``q`` in the plan's vertex space, ascending."""
        b, j = self.block_of_query(q)
        base = self.block_base(b)
        return sorted(int(base[i]) for i in iter_bits(self.block_rows(b)[j]))

    def query_tag(self, q: int) -> str:
        b, j = self.block_of_query(q)
        parts = [f"{k}={int(v[b])}" for k, v in self.meta.items()]
        parts.append(f"block={b}")
        parts.append(f"row={j}")
        return f"{self.tag}[{','.join(parts)}]"

    def relabel(self, vertices: np.ndarray) -> "QueryBatch":
        vertices = np.asarray(vertices, dtype=np.int32)
        return replace(self, bases=vertices[self.bases])

    def digest_into(self, h) -> None:
        h.update(self.tag.encode())
        h.update(self.kind.encode())
        for a in (self.bases, self.base_offsets, self.masks, self.mask_offsets):
            h.update(a.tobytes())
        for k in sorted(self.meta):
            h.update(k.encode())
            h.update(self.meta[k].tobytes())


def single_block_batch(tag: str, kind: str, base: Sequence[int], rows: Sequence[int], meta=None) -> QueryBatch:
    """Batch holding one block whose rows are given as Python ints."""
    base = np.asarray(base, dtype=np.int32)
    ws = words_for(base.size)
    words = np.zeros((len(rows), ws), dtype=np.uint64)
    full = (1 << WORD) - 1
    for r, row in enumerate(rows):
        for j in range(ws):
            words[r, j] = (row >> (WORD * j)) & full
    return QueryBatch(
        tag=tag,
        kind=kind,
        bases=base,
        base_offsets=np.array([0, base.size]),
        masks=words.reshape(-1),
        mask_offsets=np.array([0, words.size]),
        meta={k: np.array([v]) for k, v in (meta or {}).items()},
    )


def concat_batches(tag: str, kind: str, parts: Sequence[QueryBatch]) -> QueryBatch:
    """Join batches of the same layout into one, preserving block order."""
    if not parts:
        return empty_batch(tag, kind)
    bases = np.concatenate([p.bases for p in parts])
    masks = np.concatenate([p.masks for p in parts])
    boff = [np.zeros(1, dtype=np.int64)]
    moff = [np.zeros(1, dtype=np.int64)]
    bshift = mshift = 0
    for p in parts:
        boff.append(p.base_offsets[1:] + bshift)
        moff.append(p.mask_offsets[1:] + mshift)
        bshift += p.bases.size
        mshift += p.masks.size
    keys = list(parts[0].meta)
    meta = {k: np.concatenate([p.meta[k] for p in parts]) for k in keys}
    return QueryBatch(tag, kind, bases, np.concatenate(boff), masks, np.concatenate(moff), meta)


def empty_batch(tag: str, kind: str) -> QueryBatch:
    z = np.zeros(1, dtype=np.int64)
    return QueryBatch(tag, kind, np.zeros(0, np.int32), z, np.zeros(0, np.uint64), z)


@dataclass(frozen=True, eq=False)
class RoundPlan:
    """All queries of one round, as an ordered tuple of batches.

    ``n`` is the real vertex count.  ``groups`` (optional) maps each vertex of
    the plan's space to the real vertices it stands for.
    """

    n: int
    batches: tuple[QueryBatch, ...]
    round_index: int = 1
    groups: Optional[tuple[np.ndarray, ...]] = None

    def __post_init__(self) -> None:
        if self.round_index < 1:
            raise ValueError("round_index starts at 1")
        object.__setattr__(self, "batches", tuple(self.batches))
        if self.groups is not None:
            object.__setattr__(self, "groups", tuple(_readonly(g, np.int32) for g in self.groups))
        off = np.zeros(len(self.batches) + 1, dtype=np.int64)
        np.cumsum([b.num_queries for b in self.batches], out=off[1:])
        object.__setattr__(self, "_boff", off)
        space = self.space_size
        for b in self.batches:
            if b.bases.size and (int(b.bases.min()) < 0 or int(b.bases.max()) >= space):
                raise ValueError(f"batch {b.tag!r} references vertices outside the plan space")

    @property
    def space_size(self) -> int:
        return self.n if self.groups is None else len(self.groups)

    @property
    def num_queries(self) -> int:
        return int(self._boff[-1])

    def __len__(self) -> int:
        return self.num_queries

    @property
    def batch_offsets(self) -> np.ndarray:
        return self._boff

    def batch(self, tag: str) -> QueryBatch:
        for b in self.batches:
            if b.tag == tag:
                return b
        raise KeyError(tag)

    def batch_slice(self, tag: str) -> slice:
        for i, b in enumerate(self.batches):
            if b.tag == tag:
                return slice(int(self._boff[i]), int(self._boff[i + 1]))
        raise KeyError(tag)

    def for_round(self, round_index: int) -> "RoundPlan":
        return replace(self, round_index=round_index)

    def relabel(self, vertices, n: Optional[int] = None) -> "RoundPlan":
        """Map plan vertex i to real vertex ``vertices[i]`` of an ``n``-vertex graph."""
        vertices = np.asarray(vertices, dtype=np.int32)
        if vertices.size != self.space_size:
            raise ValueError("relabel needs one real vertex per plan vertex")
        n = self.n if n is None else n
        return replace(self, n=n, batches=tuple(b.relabel(vertices) for b in self.batches), groups=None)

    def with_groups(self, groups: Sequence[np.ndarray], n: Optional[int] = None) -> "RoundPlan":
        """Let plan vertex i stand for the real vertices ``groups[i]`` of an ``n``-vertex graph."""
        if self.groups is not None:
            raise ValueError("plan is already expressed over groups")
        n = self.n if n is None else n
        return replace(self, n=n, groups=tuple(np.asarray(g, dtype=np.int32) for g in groups))

    def locate(self, q: int) -> tuple[int, int]:
        i = int(np.searchsorted(self._boff, q, side="right")) - 1
        if not 0 <= i < len(self.batches):
            raise IndexError(q)
        return i, q - int(self._boff[i])

    def query_set(self, q: int) -> VertexSet:
        """Real vertex set asked by query ``q``."""
        i, local = self.locate(q)
        members = self.batches[i].query_members(local)
        if self.groups is None:
            return VertexSet.of(self.n, members)
        bits = 0
        for x in members:
            for v in self.groups[x]:
                bits |= 1 << int(v)
        return VertexSet(self.n, bits)

    def query_tag(self, q: int) -> str:
        i, local = self.locate(q)
        return self.batches[i].query_tag(local)

    def queries(self) -> Iterator[tuple[int, VertexSet, str]]:
        """Yield ``(index, real vertex set, tag)`` in plan order."""
        for q in range(self.num_queries):
            yield q, self.query_set(q), self.query_tag(q)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n).encode())
        h.update(str(self.round_index).encode())
        for b in self.batches:
            b.digest_into(h)
        if self.groups is not None:
            for g in self.groups:
                h.update(g.tobytes())
                h.update(b"|")
        return h.hexdigest()


def merge_plans(plans: Sequence[RoundPlan]) -> RoundPlan:
    """Concatenate same-space plans into one round."""
    if not plans:
        raise ValueError("nothing to merge")
    n = plans[0].n
    if any(p.n != n or p.groups is not None for p in plans):
        raise ValueError("only ungrouped plans over the same vertices can be merged")
    return RoundPlan(n, tuple(b for p in plans for b in p.batches))


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Pack a boolean ``(r, s)`` matrix into ``(r, ceil(s/64))`` little-endian uint64 words."""
    rows = np.asarray(rows, dtype=bool)
    r, s = rows.shape
    ws = words_for(s)
    if ws == 0:
        return np.zeros((r, 0), dtype=np.uint64)
    packed = np.packbits(rows, axis=1, bitorder="little")
    buf = np.zeros((r, ws * 8), dtype=np.uint8)
    buf[:, : packed.shape[1]] = packed
    return buf.view("<u8").astype(np.uint64)
