"""The counted, round-enforcing query oracle."""

from __future__ import annotations

import enum
import json
import os
from typing import Iterator, Optional, Sequence

import numpy as np

from .graph import HiddenGraph, pack_adjacency
from .kernels import evaluate_batch
from .plan import RoundPlan


class SessionState(enum.Enum):
    OPEN = "open"
    SEALED = "sealed"
    CLOSED = "closed"


class SessionError(RuntimeError):
    """Misuse of an oracle session (closed, out of rounds, wrong order)."""


class Answers(Sequence):
    """Answers to one sealed round.

    Behaves as a sequence of ``(query_id, bool)`` pairs; ``values`` exposes the
    same answers as a read-only boolean array aligned with the plan.
    """

    def __init__(self, plan: RoundPlan, first_id: int, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=bool)
        values.setflags(write=False)
        self.plan = plan
        self.first_id = first_id
        self.values = values

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return self.first_id + i, bool(self.values[i])

    def __iter__(self) -> Iterator[tuple[int, bool]]:
        for i, a in enumerate(self.values.tolist()):
            yield self.first_id + i, a

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def for_batch(self, tag: str) -> np.ndarray:
        return self.values[self.plan.batch_slice(tag)]


class OracleSession:
    """Answers independent-set queries about a hidden graph, one round at a time.

    The session owns all counting.  A round is sealed the moment it is
    submitted; its answers are only returned after every query of the round
    has been fixed.  ``max_rounds`` turns round budgets into hard errors.
    """

    def __init__(self, graph: HiddenGraph, max_rounds: Optional[int] = None, record: bool = False) -> None:
        if max_rounds is not None and max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")
        self._graph = graph
        self.max_rounds = max_rounds
        self.rounds_used = 0
        self.queries_used = 0
        self.state = SessionState.OPEN if max_rounds != 0 else SessionState.SEALED
        self._record = record
        self._history: list[tuple[RoundPlan, Answers]] = []
        self._contractions: dict[int, tuple[tuple[np.ndarray, ...], np.ndarray]] = {}

    @property
    def n(self) -> int:
        return self._graph.n

    def close(self) -> None:
        self.state = SessionState.CLOSED

    def submit_round(self, plan: RoundPlan) -> Answers:
        if self.state is SessionState.CLOSED:
            raise SessionError("session is closed")
        if self.state is SessionState.SEALED:
            raise SessionError(f"round budget of {self.max_rounds} exhausted")
        if plan.n != self._graph.n:
            raise SessionError(f"plan over {plan.n} vertices submitted to a graph on {self._graph.n}")
        if plan.round_index != self.rounds_used + 1:
            raise SessionError(f"expected round {self.rounds_used + 1}, got round {plan.round_index}")
        adj = self._space_adjacency(plan)
        parts = [evaluate_batch(adj, b) for b in plan.batches]
        values = np.concatenate(parts) if parts else np.zeros(0, dtype=bool)
        answers = Answers(plan, self.queries_used, values)
        self.rounds_used += 1
        self.queries_used += values.size
        if self.max_rounds is not None and self.rounds_used >= self.max_rounds:
            self.state = SessionState.SEALED
        if self._record:
            self._history.append((plan, answers))
        return answers

    def _space_adjacency(self, plan: RoundPlan) -> np.ndarray:
        if plan.groups is None:
            return self._graph.adjacency_words()
        key = id(plan.groups)
        hit = self._contractions.get(key)
        if hit is not None and hit[0] is plan.groups:
            return hit[1]
        adj = contracted_adjacency(self._graph, plan.groups)
        self._contractions = {key: (plan.groups, adj)}
        return adj

    def history(self) -> list[tuple[RoundPlan, Answers]]:
        if not self._record:
            raise SessionError("session was created without record=True")
        return list(self._history)

    def transcript(self) -> list[dict]:
        """Plain-data transcript of every recorded round."""
        rounds = []
        for plan, answers in self.history():
            queries = []
            for (q, vs, tag), (qid, a) in zip(plan.queries(), answers):
                queries.append({"query_id": qid, "members": vs.members(), "tag": tag, "answer": a})
            rounds.append({"round": plan.round_index, "queries": queries})
        return rounds

    def dump_transcript(self, path: str | os.PathLike) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(self.transcript(), fh, indent=1)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write transcript to {path}: {exc}") from exc


def contracted_adjacency(graph: HiddenGraph, groups: Sequence[np.ndarray]) -> np.ndarray:
    """Adjacency over groups: i~j iff an edge joins them, i~i iff one lies inside.

    With the diagonal set this way, a set of groups contains an adjacent pair
    (or a looped group) exactly when the union of its groups contains an edge.
    """
    group_of = np.full(graph.n, -1, dtype=np.int64)
    for gi, g in enumerate(groups):
        g = np.asarray(g, dtype=np.int64)
        if g.size and (g.min() < 0 or g.max() >= graph.n):
            raise ValueError("group member outside the vertex range")
        if np.any(group_of[g] >= 0) or np.unique(g).size != g.size:
            raise ValueError("groups must be disjoint")
        group_of[g] = gi
    e = graph.edge_array()
    gu, gv = group_of[e[:, 0]], group_of[e[:, 1]]
    keep = (gu >= 0) & (gv >= 0)
    gu, gv = gu[keep], gv[keep]
    loops = np.unique(gu[gu == gv])
    cross = np.unique(np.stack([gu[gu != gv], gv[gu != gv]], axis=1), axis=0)
    return pack_adjacency(len(groups), cross, loops.tolist())
