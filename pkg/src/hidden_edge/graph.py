"""Hidden graphs, vertex sets, independent-set queries and decoder outcomes."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np


@dataclass(frozen=True, order=True)
class Edge:
    """Undirected edge, always stored with the smaller endpoint first."""

    u: int
    v: int

    def __post_init__(self) -> None:
        u, v = int(self.u), int(self.v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if u < 0 or v < 0:
            raise ValueError(f"negative vertex in edge ({u}, {v})")
        if u > v:
            u, v = v, u
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __iter__(self) -> Iterator[int]:
        yield self.u
        yield self.v

    def as_tuple(self) -> tuple[int, int]:
        return (self.u, self.v)


def _bits_of(members: Iterable[int], n: int) -> int:
    bits = 0
    for x in members:
        x = int(x)
        if not 0 <= x < n:
            raise ValueError(f"vertex {x} outside [0, {n})")
        bits |= 1 << x
    return bits


def iter_bits(bits: int) -> Iterator[int]:
    """Positions of the set bits of a non-negative int, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class VertexSet:
    """A subset of ``range(n)`` backed by an integer bitmask."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0) -> None:
        if n < 0:
            raise ValueError("n must be non-negative")
        if bits < 0 or bits >> n:
            raise ValueError("bitmask has members outside [0, n)")
        self.n = int(n)
        self.bits = int(bits)

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "VertexSet":
        return cls(n, _bits_of(members, n))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, (1 << n) - 1)

    @classmethod
    def range(cls, n: int, lo: int, hi: int) -> "VertexSet":
        if not 0 <= lo <= hi <= n:
            raise ValueError(f"range [{lo}, {hi}) outside [0, {n}]")
        return cls(n, ((1 << hi) - 1) ^ ((1 << lo) - 1))

    def __contains__(self, x: object) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < self.n and bool(self.bits >> int(x) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def _check(self, other: "VertexSet") -> None:
        if self.n != other.n:
            raise ValueError(f"vertex sets over different ground sets ({self.n} vs {other.n})")

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits | other.bits)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.n, self.bits & ~other.bits)

    def issubset(self, other: "VertexSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def members(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VertexSet) and self.n == other.n and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, {self.members()})"


class HiddenGraph:
    """A simple undirected graph on ``range(n)``.

    The canonical store is a sorted ``(m, 2)`` edge array; Python-int
    adjacency masks (reference query path) and the packed ``uint64`` matrix
    (batch kernels) are derived on first use.
    """

    def __init__(self, n: int, edges: Iterable[Edge | tuple[int, int]] | np.ndarray = ()) -> None:
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = int(n)
        if isinstance(edges, np.ndarray):
            arr = edges.astype(np.int64, copy=True).reshape(-1, 2)
        else:
            arr = np.array([tuple(e) for e in edges], dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if np.any(arr[:, 0] == arr[:, 1]):
                bad = arr[arr[:, 0] == arr[:, 1]][0]
                raise ValueError(f"self-loop at vertex {bad[0]}")
            arr.sort(axis=1)
            if arr.min() < 0 or arr.max() >= self.n:
                raise ValueError(f"edge endpoint outside [0, {self.n})")
            key = arr[:, 0] * self.n + arr[:, 1]
            order = np.argsort(key, kind="stable")
            arr, key = arr[order], key[order]
            dup = np.flatnonzero(key[1:] == key[:-1])
            if dup.size:
                u, v = arr[dup[0]]
                raise ValueError(f"duplicate edge ({u}, {v})")
        arr.setflags(write=False)
        self._edge_array = arr
        self._edges: Optional[frozenset[Edge]] = None
        self._adj: Optional[tuple[int, ...]] = None
        self._words: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return int(self._edge_array.shape[0])

    @property
    def edges(self) -> frozenset[Edge]:
        if self._edges is None:
            self._edges = frozenset(Edge(int(u), int(v)) for u, v in self._edge_array)
        return self._edges

    def _adjacency(self) -> tuple[int, ...]:
        if self._adj is None:
            adj = [0] * self.n
            for u, v in self._edge_array.tolist():
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            self._adj = tuple(adj)
        return self._adj

    def degree(self, v: int) -> int:
        return self._adjacency()[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self._adjacency()[v]))

    def adjacency_bits(self, v: int) -> int:
        return self._adjacency()[v]

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and 0 <= u < self.n and 0 <= v < self.n and bool(self._adjacency()[u] >> v & 1)

    def contains(self, e: Edge) -> bool:
        return self.has_edge(e.u, e.v)

    def sorted_edges(self) -> list[Edge]:
        return [Edge(u, v) for u, v in self._edge_array.tolist()]

    def edge_array(self) -> np.ndarray:
        """Read-only ``(m, 2)`` int64 array of edges, lexicographically sorted."""
        return self._edge_array

    def adjacency_words(self) -> np.ndarray:
        """Read-only ``(n, ceil(n/64))`` uint64 adjacency bit matrix."""
        if self._words is None:
            self._words = pack_adjacency(self.n, self._edge_array)
        return self._words

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, HiddenGraph)
            and self.n == other.n
            and np.array_equal(self._edge_array, other._edge_array)
        )

    def __hash__(self) -> int:
        return hash((self.n, self._edge_array.tobytes()))

    def __repr__(self) -> str:
        return f"HiddenGraph(n={self.n}, m={self.m})"


def pack_adjacency(n: int, pairs: Iterable[tuple[int, int]], loops: Iterable[int] = ()) -> np.ndarray:
    """Pack symmetric adjacency (optionally with diagonal bits) into uint64 words."""
    words = max(1, (n + 63) // 64)
    out = np.zeros((n, words), dtype=np.uint64)
    arr = pairs if isinstance(pairs, np.ndarray) else np.asarray(list(pairs), dtype=np.int64)
    arr = arr.astype(np.int64, copy=False).reshape(-1, 2)
    if arr.size:
        u, v = arr[:, 0], arr[:, 1]
        for a, b in ((u, v), (v, u)):
            np.bitwise_or.at(out, (a, b >> 6), np.left_shift(np.uint64(1), (b & 63).astype(np.uint64)))
    for x in loops:
        out[x, x >> 6] |= np.uint64(1) << np.uint64(x & 63)
    out.setflags(write=False)
    return out


def is_query(graph: HiddenGraph, a: VertexSet) -> bool:
    """True iff ``a`` contains both endpoints of some edge of ``graph``."""
    if a.n != graph.n:
        raise ValueError(f"query over {a.n} vertices asked of a graph on {graph.n}")
    bits = a.bits
    if not bits:
        return False
    if graph.m * 64 < graph.n * graph.n:
        return any(bits >> u & 1 and bits >> v & 1 for u, v in graph.edge_array().tolist())
    adj = graph._adjacency()
    return any(adj[u] & bits for u in iter_bits(bits))


def sample_subset(universe: VertexSet, p: float, rng: np.random.Generator) -> VertexSet:
    """Draw from T_p(universe): keep each member independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    members = np.fromiter(iter_bits(universe.bits), dtype=np.int64)
    keep = rng.random(members.size) < p
    return VertexSet.of(universe.n, members[keep].tolist())


class Status(enum.Enum):
    FOUND = "found_edge"
    NONE = "no_edge_found"
    MORE_THAN_ONE = "more_than_one"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class FindOutcome:
    status: Status
    edge: Optional[Edge] = None

    def __post_init__(self) -> None:
        if (self.status is Status.FOUND) != (self.edge is not None):
            raise ValueError("an edge is carried exactly by FOUND outcomes")

    @staticmethod
    def found(u: int, v: int) -> "FindOutcome":
        return FindOutcome(Status.FOUND, Edge(u, v))

    @property
    def is_found(self) -> bool:
        return self.status is Status.FOUND

    def __repr__(self) -> str:
        if self.edge is None:
            return f"FindOutcome({self.status.name})"
        return f"FindOutcome(FOUND {self.edge.u}-{self.edge.v})"


NONE = FindOutcome(Status.NONE)
MORE_THAN_ONE = FindOutcome(Status.MORE_THAN_ONE)
UNDETERMINED = FindOutcome(Status.UNDETERMINED)


def outcome_correct(outcome: FindOutcome, graph: HiddenGraph) -> bool:
    """A found edge must be real; "none" is right only for an edgeless graph."""
    if outcome.is_found:
        return graph.contains(outcome.edge)
    return outcome.status is Status.NONE and graph.m == 0


def read_graph(path: str | os.PathLike) -> HiddenGraph:
    """Parse the text format: a header ``n m`` then ``m`` lines ``u v`` with u < v."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError(f"{path}: first line must be 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"{path}: header promises {m} edges, found {len(body)}")
    edges = []
    for k, parts in enumerate(body, start=2):
        if len(parts) != 2:
            raise ValueError(f"{path}:{k}: expected 'u v'")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise ValueError(f"{path}:{k}: endpoints must satisfy u < v")
        edges.append((u, v))
    return HiddenGraph(n, edges)


def write_graph(graph: HiddenGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.m}\n")
        for e in graph.sorted_edges():
            fh.write(f"{e.u} {e.v}\n")
