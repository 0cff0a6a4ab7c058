import pytest
from hypothesis import given
from hypothesis import strategies as st

from degseq.core import (
    Graph,
    Kind,
    canonical_key,
    check_sequence,
    d_operation,
    graph_violation,
    group,
    parse_sequence,
    validate_graph,
    z_vector,
)


def test_z_vector_counts_degrees_at_least_h():
    assert z_vector([3, 3, 3, 2, 1], 5) == (5, 4, 3, 0, 0)
    assert z_vector([2, 1, 1], 3) == (3, 1, 0)
    assert z_vector([], 2) == (0, 0)
    assert z_vector([4], 2) == (1, 1)


@given(st.lists(st.integers(0, 8), max_size=10), st.integers(0, 10))
def test_z_vector_matches_definition(a, length):
    z = z_vector(a, length)
    assert len(z) == length
    for h in range(1, length + 1):
        assert z[h - 1] == sum(1 for x in a if x >= h)


@given(st.lists(st.integers(1, 8), max_size=10))
def test_z_vector_full_length_sums_to_total(a):
    assert sum(z_vector(a, max(a, default=0))) == sum(a)


def test_d_operation_pads_with_zeros():
    assert d_operation([3, 1], [1, 1, 1]) == (2, 0, -1)
    assert d_operation([], []) == ()
    assert d_operation([2, 2, 2], [1]) == (1, 2, 2)


def test_group_orders_by_degree_and_drops_zeros():
    gs = group([2, 0, 1, 2, 1])
    assert [(g.alpha, g.members) for g in gs] == [(1, (2, 4)), (2, (0, 3))]
    assert [g.m for g in gs] == [2, 2]
    assert group([3, 4], ids=[10, 20])[1].members == (20,)


@given(st.lists(st.integers(0, 5), max_size=12))
def test_group_partitions_nonzero_nodes(seq):
    gs = group(seq)
    alphas = [g.alpha for g in gs]
    assert alphas == sorted(set(alphas))
    members = sorted(i for g in gs for i in g.members)
    assert members == [i for i, d in enumerate(seq) if d > 0]


def test_graph_normalizes_edges():
    g = Graph.from_edges("undirected", [(2, 0), (1, 0)], 3)
    assert g.edges == ((0, 1), (0, 2))
    assert canonical_key(g) == g.key == g.edges
    h = Graph.from_edges(Kind.UNDIRECTED, [(0, 1), (0, 2)], 3)
    assert g == h


def test_bipartite_json_edges_offset_right_ids():
    g = Graph.from_edges("bipartite", [(0, 1), (2, 0)], 3, 2)
    assert g.to_json_edges() == [[0, 4], [2, 3]]
    assert Graph.from_json_edges("bipartite", g.to_json_edges(), 3, 2) == g


def test_validate_graph():
    g = Graph.from_edges("directed", [(0, 1), (0, 2), (1, 0), (2, 0)], 3)
    assert validate_graph(g, [2, 1, 1], [2, 1, 1])
    assert not validate_graph(g, [1, 2, 1], [2, 1, 1])
    loop = Graph("directed", 2, 2, ((0, 0),))
    assert "self-loop" in graph_violation(loop, [1, 0], [1, 0])
    dup = Graph("bipartite", 1, 1, ((0, 0), (0, 0)))
    assert "repeated" in graph_violation(dup, [2], [2])
    path = Graph.from_edges("undirected", [(0, 1), (1, 2)], 3)
    assert validate_graph(path, [1, 2, 1])


def test_parse_sequence():
    assert parse_sequence("2,1,1") == [2, 1, 1]
    assert parse_sequence(" 3, 0 ") == [3, 0]
    assert parse_sequence("") == []
    with pytest.raises(ValueError):
        parse_sequence("2,-1")
    with pytest.raises(ValueError):
        parse_sequence("2,,1")
    with pytest.raises(ValueError):
        parse_sequence("a")


def test_check_sequence_rejects_bad_entries():
    assert check_sequence((1, 2)) == [1, 2]
    with pytest.raises(ValueError):
        check_sequence([1, -1])
    with pytest.raises(ValueError):
        check_sequence([1.5])
    with pytest.raises(ValueError):
        check_sequence([True])


def test_kind_parse():
    assert Kind.parse("Directed") is Kind.DIRECTED
    assert Kind.parse(Kind.BIPARTITE) is Kind.BIPARTITE
    with pytest.raises(ValueError):
        Kind.parse("hyper")
