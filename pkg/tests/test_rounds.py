import itertools
import math

import numpy as np
import pytest

from hidden_edge import HiddenGraph, OracleSession, SessionError, Status, VertexSet, make_rng
from hidden_edge import generators as gen
from hidden_edge.general import run_general
from hidden_edge.rounds import (
    Partition,
    binary_search_rounds,
    contract_query,
    det_rounds_budget,
    partition_cap,
    partition_size,
    rand_rounds_budget,
    run_binary_search,
    run_det_rounds,
    run_rand_rounds,
)

from oracles import all_graphs, explore_transcripts, transcript_verdict


def correct(out, g):
    if out.is_found:
        return g.contains(out.edge)
    return out.status is Status.NONE and g.m == 0


# ------------------------------------------------------------- partitions


@pytest.mark.parametrize(
    "n,r,k,t",
    [(16, 2, 12, 2), (64, 2, 20, 4), (64, 3, 12, 8), (1000, 3, 24, 50), (1024, 2, 68, 16), (2, 1, 8, 0)],
)
def test_partition_formulas(n, r, k, t):
    assert partition_size(n, r) == k == math.ceil(2 * n ** (1 / r) - 1e-9) + 4
    assert partition_cap(n, r) == t == math.floor(n ** (1 - 1 / r) / 2 + 1e-9)


def test_partition_formulas_are_exact_at_perfect_powers():
    for base in range(1, 40):
        for r in (2, 3, 4):
            n = base**r
            assert partition_size(n, r) == 2 * base + 4
            assert partition_cap(n, r) == base ** (r - 1) // 2


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_partition_blocks_are_disjoint_and_cover(r):
    for n in range(1, 2049):
        vertices = np.arange(0, 2 * n, 2)
        part = Partition.build(2 * n, vertices, r)
        joined = np.concatenate(part.blocks)
        assert joined.size == n
        assert np.array_equal(np.sort(joined), vertices)
        assert part.max_block == math.ceil(n / min(part.k, n))


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_partition_size_times_cap_covers_n(r):
    """k blocks of at most t vertices must be able to hold the whole working set."""
    short = [n for n in range(1, 2049) if partition_size(n, r) * partition_cap(n, r) < n]
    assert short == []


def test_contract_query_examples():
    blocks = [VertexSet.of(6, [0, 1]), VertexSet.of(6, [2, 3]), VertexSet.of(6, [4, 5])]
    assert contract_query(blocks, [0, 2]) == VertexSet.of(6, [0, 1, 4, 5])
    assert contract_query(blocks, []) == VertexSet(6)
    with pytest.raises(IndexError):
        contract_query(blocks, [3])
    with pytest.raises(ValueError):
        contract_query([], [])
    assert contract_query([], [], n=4) == VertexSet(4)


def test_partition_contract_matches_blocks():
    part = Partition.build(20, np.arange(20), 2)
    got = part.contract([0, 3])
    assert got.members() == sorted(part.blocks[0].tolist() + part.blocks[3].tolist())


# ------------------------------------------------------------- det_rounds


def test_sixteen_vertices_two_rounds():
    g = HiddenGraph(16, [(3, 11)])
    s = OracleSession(g, record=True)
    out = run_det_rounds(s, 2)
    assert (out.edge.u, out.edge.v) == (3, 11)
    t = s.transcript()
    assert len(t) == 2
    assert len(t[0]["queries"]) == 66
    assert len(t[1]["queries"]) <= 6


@pytest.mark.parametrize("r", [1, 2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 9, 64, 300])
def test_empty_graph_gives_none(n, r):
    s = OracleSession(HiddenGraph(n), max_rounds=r)
    assert run_det_rounds(s, r).status is Status.NONE


@pytest.mark.parametrize("n", range(2, 7))
def test_det_rounds_exact_on_every_graph(n):
    for edges in all_graphs(n):
        g = HiddenGraph(n, edges)
        for r in (1, 2, 3):
            s = OracleSession(g, max_rounds=r)
            out = run_det_rounds(s, r)
            assert correct(out, g), (edges, r, out)
            assert s.queries_used <= det_rounds_budget(n, r)


@pytest.mark.parametrize("n", [7, 8])
def test_det_rounds_three_rounds_exact_on_every_transcript(n):
    leaves = 0
    for session, out in explore_transcripts(n, lambda s: run_det_rounds(s, 3)):
        edge = (out.edge.u, out.edge.v) if out.is_found else None
        assert out.status in (Status.FOUND, Status.NONE)
        assert transcript_verdict(n, session.queries, session.answers, edge) is True
        assert session.rounds_used <= 3
        assert session.queries_used <= det_rounds_budget(n, 3)
        leaves += 1
    assert leaves > 64


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("n", [7, 8])
def test_det_rounds_on_sampled_graphs_at_seven_and_eight(n, r):
    pairs = list(itertools.combinations(range(n), 2))
    rng = np.random.default_rng(100 * n + r)
    graphs = [[]] + [[p] for p in pairs] + [list(e) for e in itertools.combinations(pairs, 2)]
    graphs += [[p for p in pairs if rng.random() < q] for q in (0.05, 0.2, 0.5, 0.9) for _ in range(250)]
    for edges in graphs:
        g = HiddenGraph(n, edges)
        s = OracleSession(g, max_rounds=r)
        assert correct(run_det_rounds(s, r), g)
        assert s.queries_used <= det_rounds_budget(n, r)


@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("n", [50, 100, 500, 1000, 2000])
def test_det_rounds_budget_on_planted_edges(n, r):
    for t in range(5):
        g = gen.planted_edge(n, make_rng(n, t, "g"))
        s = OracleSession(g, max_rounds=r)
        out = run_det_rounds(s, r)
        assert g.contains(out.edge)
        assert s.rounds_used <= r
        assert s.queries_used <= det_rounds_budget(n, r)


def test_det_rounds_rejects_zero_rounds():
    with pytest.raises(ValueError):
        run_det_rounds(OracleSession(HiddenGraph(4)), 0)


# ------------------------------------------------------------- binary search


@pytest.mark.parametrize("n", range(2, 33))
def test_binary_search_on_every_single_edge_graph(n):
    limit = max(1, math.ceil(math.log2(n)))
    for u, v in itertools.combinations(range(n), 2):
        s = OracleSession(HiddenGraph(n, [(u, v)]), record=True)
        out = run_binary_search(s)
        assert (out.edge.u, out.edge.v) == (u, v)
        assert s.rounds_used <= limit
        assert s.rounds_used == binary_search_rounds(n)
        assert all(len(rd["queries"]) <= 6 for rd in s.transcript())


def test_binary_search_sixteen_uses_at_most_24_queries():
    for u, v in itertools.combinations(range(16), 2):
        s = OracleSession(HiddenGraph(16, [(u, v)]))
        run_binary_search(s)
        assert s.queries_used <= 24


@pytest.mark.parametrize("n", [5, 8, 9])
def test_binary_search_exact_on_every_transcript(n):
    for session, out in explore_transcripts(n, run_binary_search):
        edge = (out.edge.u, out.edge.v) if out.is_found else None
        assert transcript_verdict(n, session.queries, session.answers, edge) is True


def test_binary_search_on_arbitrary_graphs_names_an_edge():
    for t in range(200):
        g = gen.gnp(40, 0.02 + 0.01 * (t % 10), make_rng(6, t))
        out = run_binary_search(OracleSession(g))
        assert correct(out, g)


@pytest.mark.parametrize("n", [4, 8, 16, 32, 33, 64])
def test_det_rounds_with_many_rounds_is_binary_search(n):
    r = max(2, math.ceil(math.log2(n)))
    for u, v in [(0, 1), (0, n - 1), (n // 2 - 1, n // 2)]:
        a = OracleSession(HiddenGraph(n, [(u, v)]), record=True)
        b = OracleSession(HiddenGraph(n, [(u, v)]), record=True)
        assert run_det_rounds(a, r) == run_binary_search(b)
        assert a.transcript() == b.transcript()


# ------------------------------------------------------------- randomized rounds


def test_rand_rounds_with_one_round_is_the_one_round_finder():
    g = gen.planted_edge(24, make_rng(1))
    a = OracleSession(g, record=True)
    b = OracleSession(g, record=True)
    assert run_rand_rounds(a, 1, 1.0, make_rng(3, 0, "alg")) == run_general(b, 1.0, make_rng(3, 0, "alg"))
    assert a.transcript() == b.transcript()


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("n", [64, 256])
def test_rand_rounds_budget_and_success(n, r):
    ok = 0
    for t in range(20):
        g = gen.planted_edge(n, make_rng(n, t, "g"))
        s = OracleSession(g, max_rounds=r)
        out = run_rand_rounds(s, r, 6.0, make_rng(n, t, "alg"))
        ok += out.is_found and g.contains(out.edge)
        assert not out.is_found or g.contains(out.edge)
        assert s.rounds_used <= r
        assert s.queries_used <= rand_rounds_budget(n, r, 6.0)
    assert ok >= 19


def test_rand_rounds_is_seed_deterministic():
    g = gen.planted_star(40, 7, make_rng(2))
    runs = []
    for _ in range(2):
        s = OracleSession(g, record=True)
        run_rand_rounds(s, 2, 1.0, make_rng(8, 1, "alg"))
        runs.append(s.transcript())
    assert runs[0] == runs[1]


def test_rand_rounds_argument_checks():
    with pytest.raises(ValueError):
        run_rand_rounds(OracleSession(HiddenGraph(4)), 0, 1.0, make_rng(0))
    with pytest.raises(ValueError):
        run_rand_rounds(OracleSession(HiddenGraph(4)), 2, 0.0, make_rng(0))


def test_drivers_respect_the_round_limit():
    g = HiddenGraph(64, [(5, 60)])
    s = OracleSession(g, max_rounds=1)
    with pytest.raises(SessionError):
        run_det_rounds(s, 2)
