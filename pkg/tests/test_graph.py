from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import graphs
from treelike.errors import DisconnectedError, GraphFormatError, InvalidVertexError
from treelike.generators import cycle, grid, path
from treelike.graph import (Graph, ball, bfs_distances, boundaries, components, disjoint_union, interval,
                            is_between, is_convex, set_diameter, set_distance, threshold_graph)


def _nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from(g.edges())
    return h


def test_bfs_examples():
    assert bfs_distances(path(3), 0) == [0, 1, 2]
    assert bfs_distances(path(1), 0) == [0]
    g = Graph.from_edges(3, [(0, 1)])
    assert bfs_distances(g, 0) == [0, 1, None]
    with pytest.raises(DisconnectedError):
        g.distance(0, 2)


def test_interval_examples():
    assert interval(path(3), 0, 2) == {0, 1, 2}
    assert interval(cycle(4), 0, 2) == {0, 1, 2, 3}
    assert interval(cycle(4), 1, 1) == {1}


def test_is_convex_examples():
    c4 = cycle(4)
    assert is_convex(c4, {0, 1})
    res = is_convex(c4, {0, 2})
    assert not res and res.witness == (0, 2, 1)
    assert is_convex(c4, set())


def test_boundaries_examples():
    bb = boundaries(path(3), {0})
    assert bb.inner == {0} and bb.outer == {1} and bb.in_edges == ((1, 0),)
    full = boundaries(path(3), {0, 1, 2})
    assert not full.inner and not full.outer and not full.in_edges
    g = grid(3, 3)
    left = {g.vertex_of(f"{i},0") for i in range(3)}
    bb = boundaries(g, left)
    assert bb.outer == {g.vertex_of(f"{i},1") for i in range(3)}
    assert len(bb.in_edges) == 3


def test_components_examples():
    assert components(path(5), {0, 4}) == [{0}, {4}]
    assert components(path(5), set()) == []
    assert components(cycle(6), {1, 2, 4, 5}) == [{1, 2}, {4, 5}]


def test_threshold_graph_examples():
    table = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
    assert threshold_graph(table, 1).edges() == [(0, 1), (1, 2)]
    assert threshold_graph(table, 0).edge_count == 0
    assert threshold_graph(table, 5).edge_count == 3
    with pytest.raises(GraphFormatError):
        threshold_graph([[0, 1], [2, 0]], 1)


def test_graph_rejects_bad_input():
    with pytest.raises(GraphFormatError):
        Graph.from_edges(2, [(0, 1), (1, 0)])
    with pytest.raises(GraphFormatError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphFormatError):
        Graph([[1], []])
    with pytest.raises(InvalidVertexError):
        path(3).neighbors(5)


def test_disjoint_union_and_set_metrics():
    g = disjoint_union(path(2), path(3))
    assert g.vertex_count == 5 and len(g.connected_components()) == 2
    assert set_diameter(g, {0, 2}) == float("inf")
    assert set_distance(path(5), {0}, {3, 4}) == 3
    assert ball(path(5), {2}, 1) == {1, 2, 3}


@settings(max_examples=60, deadline=None)
@given(graphs(max_vertices=9))
def test_distances_match_networkx(g):
    ref = dict(nx.all_pairs_shortest_path_length(_nx(g)))
    for x in range(g.vertex_count):
        row = bfs_distances(g, x)
        for y in range(g.vertex_count):
            assert row[y] == ref[x].get(y)


@settings(max_examples=60, deadline=None)
@given(graphs(max_vertices=9, connected=True))
def test_interval_laws(g):
    for x, y in combinations(range(g.vertex_count), 2):
        I = interval(g, x, y)
        assert x in I and y in I and I == interval(g, y, x)
        for z in I:
            if x in interval(g, z, y):
                assert z == x
        assert all(is_between(g, x, z, y) for z in I)


@settings(max_examples=60, deadline=None)
@given(graphs(max_vertices=9), st.data())
def test_boundary_duality(g, data):
    A = frozenset(data.draw(st.sets(st.sampled_from(range(g.vertex_count))))) if g.vertex_count else frozenset()
    comp = g.vertices - A
    bb, cb = boundaries(g, A), boundaries(g, comp)
    assert bb.outer == cb.inner and bb.inner == cb.outer
    assert set(bb.in_edges) == set(cb.out_edges)


@settings(max_examples=40, deadline=None)
@given(graphs(max_vertices=8, connected=True), st.data())
def test_convexity_closed_under_intersection(g, data):
    verts = st.sets(st.sampled_from(range(g.vertex_count)))
    A, B = frozenset(data.draw(verts)), frozenset(data.draw(verts))

    def brute(S):
        return all(interval(g, x, y) <= S for x in S for y in S)

    assert bool(is_convex(g, A)) == brute(A)
    if brute(A) and brute(B):
        assert is_convex(g, A & B)


@settings(max_examples=40, deadline=None)
@given(graphs(max_vertices=10))
def test_components_match_networkx(g):
    ours = sorted(sorted(c) for c in g.connected_components())
    ref = sorted(sorted(c) for c in nx.connected_components(_nx(g)))
    assert ours == ref
