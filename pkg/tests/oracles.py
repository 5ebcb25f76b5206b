"""Slow, obviously-correct reference implementations used to check the package."""

from __future__ import annotations

import itertools
import math

import numpy as np
import sympy
from sympy.abc import x as _x

from hidden_edge.families import op_build, op_decode
from hidden_edge.graph import Status as _Status


def naive_is_query(edges, members) -> bool:
    s = set(members)
    return any(u in s and v in s for u, v in edges)


def all_graphs(n: int):
    """Every simple graph on n vertices, as a list of edge tuples."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [p for i, p in enumerate(pairs) if mask >> i & 1]


# ------------------------------------------------------------------ GF(2^k)


def _poly(bits: int):
    return sympy.Poly([(bits >> i) & 1 for i in reversed(range(bits.bit_length()))], _x, modulus=2)


def _bits(poly) -> int:
    coeffs = [int(c) % 2 for c in poly.all_coeffs()]
    out = 0
    for c in coeffs:
        out = (out << 1) | c
    return out


def gf_mul(a: int, b: int, reduction: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _bits((_poly(a) * _poly(b)).rem(_poly(reduction)))


def is_irreducible(bits: int) -> bool:
    return _poly(bits).is_irreducible


def smallest_reduction(k: int) -> int:
    """Trinomial x^k + x^a + 1 with the smallest a, else the numerically smallest pentanomial."""
    for a in range(1, k):
        p = (1 << k) | (1 << a) | 1
        if is_irreducible(p):
            return p
    best = None
    for a, b, c in itertools.combinations(range(1, k), 3):
        p = (1 << k) | (1 << a) | (1 << b) | (1 << c) | 1
        if (best is None or p < best) and is_irreducible(p):
            best = p
    return best


def brute_inverse(a: int, k: int, reduction: int) -> int:
    for y in range(1, 1 << k):
        if gf_mul(a, y, reduction) == 1:
            return y
    raise ZeroDivisionError


# ---------------------------------------------------------------- decoding


def consistent_pairs(members, queries, answers):
    """All pairs {a, b} of ``members`` whose indicator reproduces every answer."""
    out = []
    for a, b in itertools.combinations(sorted(members), 2):
        if all((a in q and b in q) == bool(ans) for q, ans in zip(queries, answers)):
            out.append((a, b))
    return out


def maximal_consistent_edges(n, queries, answers):
    """Pairs not inside any negative query: the largest graph the answers allow."""
    neg = [set(q) for q, a in zip(queries, answers) if not a]
    return {(u, v) for u, v in itertools.combinations(range(n), 2) if not any(u in q and v in q for q in neg)}


def transcript_feasible(n, queries, answers) -> bool:
    top = maximal_consistent_edges(n, queries, answers)
    return all(any(u in q and v in q for u, v in top) for q, a in zip(queries, answers) if a)


def transcript_verdict(n, queries, answers, outcome_edge):
    """Exact correctness of an output against every graph consistent with a transcript.

    Returns None if the transcript is infeasible, else True/False.  A found
    edge is correct iff it lies in every consistent graph; "no edge" is correct
    iff the only consistent graph is empty.
    """
    top = maximal_consistent_edges(n, queries, answers)
    positives = [set(q) for q, a in zip(queries, answers) if a]
    covered = [{(u, v) for (u, v) in top if u in q and v in q} for q in positives]
    if any(not c for c in covered):
        return None
    if outcome_edge is None:
        return not top
    e = tuple(sorted(outcome_edge))
    if e not in top:
        return False
    return any(c == {e} for c in covered)


# ------------------------------------------------------- transcript search


class _Branch(Exception):
    def __init__(self, plan):
        self.plan = plan


class _Answers:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=bool)


class ScriptedSession:
    """Stands in for an oracle session and replays a fixed list of answer vectors.

    When the driver submits a round past the end of the script, the round's
    plan is raised so the caller can branch on its possible answers.
    """

    def __init__(self, n, script):
        self.n = n
        self.script = list(script)
        self.rounds_used = 0
        self.queries_used = 0
        self.queries = []
        self.answers = []

    def submit_round(self, plan):
        if self.rounds_used >= len(self.script):
            raise _Branch(plan)
        ans = np.asarray(self.script[self.rounds_used], dtype=bool)
        if ans.size != plan.num_queries:
            raise AssertionError("script does not match the plan")
        self.queries.extend(set(plan.query_set(q).members()) for q in range(plan.num_queries))
        self.answers.extend(bool(a) for a in ans)
        self.rounds_used += 1
        self.queries_used += plan.num_queries
        return _Answers(ans)


def explore_transcripts(n, driver, max_queries_per_round=12):
    """Run ``driver(session)`` on every feasible answer sequence.

    Yields ``(session, outcome)`` for each leaf of the decision tree.  A
    driver that is correct on every leaf is correct on every graph.
    """
    stack = [[]]
    while stack:
        script = stack.pop()
        session = ScriptedSession(n, script)
        try:
            out = driver(session)
        except _Branch as b:
            q = b.plan.num_queries
            if q > max_queries_per_round:
                raise AssertionError(f"round of {q} queries is too wide to enumerate")
            sets = [set(b.plan.query_set(i).members()) for i in range(q)]
            for mask in range(1 << q):
                ans = [bool(mask >> i & 1) for i in range(q)]
                if transcript_feasible(n, session.queries + sets, session.answers + ans):
                    stack.append(script + [ans])
            continue
        yield session, out


# ---------------------------------------------------------------- formulas


def matching_count_reference(n: int) -> int:
    """Query count of the halving matching finder.

    Level term floor(m/2) * g(ceil(m/2)) with g(1) = 1 and g(s) = 2 ceil(log2 s).
    """
    if n <= 1:
        return 0
    half, rest = n // 2, n - n // 2
    g = 1 if rest == 1 else 2 * math.ceil(math.log2(rest))
    return matching_count_reference(rest) + matching_count_reference(half) + half * g


def matching_count_literal(n: int) -> int:
    """The same recurrence with g(1) = 0, which leaves two-vertex halves unqueried."""
    if n <= 1:
        return 0
    half, rest = n // 2, n - n // 2
    return matching_count_literal(rest) + matching_count_literal(half) + half * 2 * math.ceil(math.log2(rest))


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials)


def failure_allowance(p: float, trials: int) -> float:
    """p + 3 sigma, the acceptance allowance for a failure rate with nominal p."""
    return p + 3 * binomial_sigma(p, trials)


def pairs_of(n: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)


# ------------------------------------------------------ overlapping products


def op_answer_matrix(n, plan):
    """Answers of every overlapping-product graph A x B, straight from the definition.

    Returns ``(ans, empty)`` indexed by (A mask, B mask).  A query Q is
    positive iff some a in A & Q and b in B & Q differ.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.array([bin(m).count("1") for m in range(1 << n)])
    rows = []
    for _, q, _ in plan.round.queries():
        qm = sum(1 << v for v in q)
        a = masks & qm
        ai, bi = a[:, None], a[None, :]
        both = (ai != 0) & (bi != 0)
        same_single = (ai == bi) & (pop[a][:, None] == 1)
        rows.append(both & ~same_single)
    ans = np.stack(rows, axis=-1)
    empty = ~((masks[:, None] != 0) & (masks[None, :] != 0) & ~((masks[:, None] == masks[None, :]) & (pop[:, None] == 1)))
    return ans, empty


def check_op_exhaustive(n):
    plan = op_build(n)
    ans, empty = op_answer_matrix(n, plan)
    flat = ans.reshape(-1, ans.shape[-1])
    patterns, inverse = np.unique(flat, axis=0, return_inverse=True)
    outcomes = [op_decode(plan, p) for p in patterns]
    masks = np.arange(1 << n)
    bad = 0
    for idx in range(flat.shape[0]):
        a, b = divmod(idx, 1 << n)
        out = outcomes[inverse.reshape(-1)[idx]]
        if empty[a, b]:
            bad += out.status is not _Status.NONE
            continue
        if not out.is_found:
            bad += 1
            continue
        u, v = out.edge.u, out.edge.v
        in_a = lambda x: masks[a] >> x & 1
        in_b = lambda x: masks[b] >> x & 1
        bad += not ((in_a(u) and in_b(v)) or (in_a(v) and in_b(u)))
    return plan.num_queries, bad
