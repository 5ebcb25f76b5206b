import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_edge import (
    Edge,
    FindOutcome,
    HiddenGraph,
    OracleSession,
    RoundPlan,
    SessionError,
    SessionState,
    Status,
    VertexSet,
    is_query,
    make_rng,
    outcome_correct,
    read_graph,
    sample_subset,
    write_graph,
)
from hidden_edge.plan import single_block_batch

from oracles import all_graphs, naive_is_query


def plan_of(n, sets, round_index=1, tag="q"):
    """A one-batch plan asking each member list in ``sets``."""
    base = list(range(n))
    rows = [sum(1 << v for v in s) for s in sets]
    batch = single_block_batch(tag, "explicit_sets", base, rows)
    return RoundPlan(n, (batch,), round_index=round_index)


# ------------------------------------------------------------- types


def test_edge_is_canonical():
    e = Edge(5, 2)
    assert (e.u, e.v) == (2, 5)
    assert e == Edge(2, 5)


def test_edge_rejects_self_loop():
    with pytest.raises(ValueError):
        Edge(3, 3)


def test_graph_rejects_loops_duplicates_and_range():
    with pytest.raises(ValueError):
        HiddenGraph(4, [(1, 1)])
    with pytest.raises(ValueError):
        HiddenGraph(4, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        HiddenGraph(4, [(1, 4)])


def test_graph_degree_and_neighbors():
    g = HiddenGraph(5, [(0, 1), (0, 3), (2, 3)])
    assert g.m == 3
    assert g.degree(0) == 2 and g.degree(4) == 0
    assert g.neighbors(3) == [0, 2]
    assert g.has_edge(3, 0) and not g.has_edge(1, 2)


def test_vertex_set_rejects_out_of_range():
    with pytest.raises(ValueError):
        VertexSet.of(4, [4])


# ------------------------------------------------------------- is_query


def test_is_query_examples():
    g = HiddenGraph(4, [(1, 2)])
    assert is_query(g, VertexSet.of(4, [1, 2]))
    assert not is_query(g, VertexSet.of(4, [1, 3]))
    assert not is_query(g, VertexSet(4))


@pytest.mark.parametrize("n", range(1, 6))
def test_is_query_matches_naive_on_every_graph_and_set(n):
    for edges in all_graphs(n):
        g = HiddenGraph(n, edges)
        for mask in range(1 << n):
            members = [v for v in range(n) if mask >> v & 1]
            assert is_query(g, VertexSet(n, mask)) == naive_is_query(edges, members)


@pytest.mark.parametrize("n", [6, 7, 8])
def test_is_query_matches_naive_exhaustively_over_sets(n):
    rng = np.random.default_rng(n)
    pairs = list(itertools.combinations(range(n), 2))
    graphs = [[]] + [[p for p in pairs if rng.random() < q] for q in (0.1, 0.3, 0.6) for _ in range(20)]
    for edges in graphs:
        g = HiddenGraph(n, edges)
        for mask in range(1 << n):
            members = [v for v in range(n) if mask >> v & 1]
            assert is_query(g, VertexSet(n, mask)) == naive_is_query(edges, members)


@st.composite
def graph_and_sets(draw):
    n = draw(st.integers(2, 40))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=30))
    a = draw(st.integers(0, (1 << n) - 1))
    extra = draw(st.integers(0, (1 << n) - 1))
    return n, edges, a, a | extra


@given(graph_and_sets())
@settings(max_examples=300, deadline=None)
def test_is_query_is_monotone(case):
    n, edges, a, b = case
    g = HiddenGraph(n, edges)
    if is_query(g, VertexSet(n, a)):
        assert is_query(g, VertexSet(n, b))


# ------------------------------------------------------------- sampling


def test_sample_subset_edges_of_the_range():
    u = VertexSet.range(50, 5, 45)
    assert sample_subset(u, 0.0, make_rng(1)) == VertexSet(50)
    assert sample_subset(u, 1.0, make_rng(1)) == u
    with pytest.raises(ValueError):
        sample_subset(u, 1.5, make_rng(1))
    with pytest.raises(ValueError):
        sample_subset(u, -0.1, make_rng(1))


def test_sample_subset_half_stays_near_mean():
    u = VertexSet.full(1000)
    sizes = [len(sample_subset(u, 0.5, make_rng(3, t, "half"))) for t in range(200)]
    assert all(400 <= s <= 600 for s in sizes)
    assert abs(np.mean(sizes) - 500) < 3 * np.sqrt(250 / 200) + 1


def test_sample_subset_stays_inside_universe_and_is_deterministic():
    u = VertexSet.of(300, range(0, 300, 3))
    a = sample_subset(u, 0.3, make_rng(9, 1, "t"))
    b = sample_subset(u, 0.3, make_rng(9, 1, "t"))
    assert a == b and a.issubset(u)


def test_rng_streams_depend_on_every_key_part():
    base = make_rng(1, 2, "x").random(4)
    assert np.array_equal(base, make_rng(1, 2, "x").random(4))
    for other in (make_rng(2, 2, "x"), make_rng(1, 3, "x"), make_rng(1, 2, "y")):
        assert not np.array_equal(base, other.random(4))


# ------------------------------------------------------------- sessions


def test_submit_round_answers_and_counts():
    g = HiddenGraph(4, [(0, 1)])
    s = OracleSession(g)
    ans = s.submit_round(plan_of(4, [[0, 1], [2, 3], [0, 2]]))
    assert [a for _, a in ans] == [True, False, False]
    assert [q for q, _ in ans] == [0, 1, 2]
    assert s.queries_used == 3 and s.rounds_used == 1


def test_empty_round_leaves_counter_alone():
    s = OracleSession(HiddenGraph(3, [(0, 1)]))
    ans = s.submit_round(RoundPlan(3, ()))
    assert len(ans) == 0 and s.queries_used == 0 and s.rounds_used == 1


def test_rounds_must_be_in_order_and_ids_stay_unique():
    s = OracleSession(HiddenGraph(4, [(2, 3)]))
    first = s.submit_round(plan_of(4, [[0, 1]]))
    with pytest.raises(SessionError):
        s.submit_round(plan_of(4, [[2, 3]], round_index=3))
    second = s.submit_round(plan_of(4, [[2, 3], [1, 2]], round_index=2))
    assert s.rounds_used == 2 and s.queries_used == 3
    ids = [q for q, _ in first] + [q for q, _ in second]
    assert ids == [0, 1, 2]


def test_closed_and_exhausted_sessions_reject_rounds():
    s = OracleSession(HiddenGraph(3), max_rounds=1)
    s.submit_round(plan_of(3, [[0, 1]]))
    assert s.state is SessionState.SEALED
    with pytest.raises(SessionError):
        s.submit_round(plan_of(3, [[0, 1]], round_index=2))
    t = OracleSession(HiddenGraph(3))
    t.close()
    with pytest.raises(SessionError):
        t.submit_round(plan_of(3, [[0, 1]]))


def test_plan_for_other_graph_size_rejected():
    with pytest.raises(SessionError):
        OracleSession(HiddenGraph(5)).submit_round(plan_of(4, [[0, 1]]))


def test_answers_are_read_only():
    s = OracleSession(HiddenGraph(3, [(0, 1)]))
    ans = s.submit_round(plan_of(3, [[0, 1]]))
    with pytest.raises(ValueError):
        ans.values[0] = False


def test_transcript_lists_members_tags_and_answers(tmp_path):
    s = OracleSession(HiddenGraph(4, [(0, 1)]), record=True)
    s.submit_round(plan_of(4, [[0, 1], [2]], tag="probe"))
    t = s.transcript()
    assert t[0]["round"] == 1
    assert t[0]["queries"][0] == {"query_id": 0, "members": [0, 1], "tag": t[0]["queries"][0]["tag"], "answer": True}
    assert t[0]["queries"][0]["tag"].startswith("probe")
    path = tmp_path / "t.json"
    s.dump_transcript(path)
    assert json.loads(path.read_text()) == t


# ------------------------------------------------------------- outcomes and files


def test_outcome_correctness_semantics():
    g = HiddenGraph(4, [(0, 1)])
    assert outcome_correct(FindOutcome.found(1, 0), g)
    assert not outcome_correct(FindOutcome.found(1, 2), g)
    assert not outcome_correct(FindOutcome(Status.NONE), g)
    assert outcome_correct(FindOutcome(Status.NONE), HiddenGraph(4))
    assert not outcome_correct(FindOutcome(Status.UNDETERMINED), g)


def test_graph_file_round_trip(tmp_path):
    g = HiddenGraph(6, [(0, 5), (1, 2), (3, 4)])
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert path.read_text().splitlines()[0] == "6 3"
    assert read_graph(path) == g


def test_graph_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2\n0 1\n")
    with pytest.raises(ValueError):
        read_graph(bad)
    loop = tmp_path / "loop.txt"
    loop.write_text("3 1\n1 1\n")
    with pytest.raises(ValueError):
        read_graph(loop)
