from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import median_graphs, trees
from treelike.errors import ContractError, NotMedianError
from treelike.generators import complete_bipartite, cycle, grid, hypercube, path
from treelike.graph import Graph, interval, is_convex
from treelike.median import (MedianGraph, as_median, check_median, check_median_bruteforce, cone, convex_hull,
                             gate_projection, median, nearest_point, require_median)


def v(g, a, b):
    return g.vertex_of(f"{a},{b}")


def test_check_median_examples():
    cert = check_median(cycle(6))
    assert not cert and cert.witness == (0, 2, 4) and cert.intersection == frozenset()
    assert check_median_bruteforce(cycle(6)).witness == (0, 2, 4)
    assert check_median(hypercube(3))
    assert check_median(path(2))


def test_k23_rejected_with_witness():
    cert = check_median(complete_bipartite(2, 3))
    assert not cert
    x, y, z = cert.witness
    common = interval(complete_bipartite(2, 3), x, y) & interval(complete_bipartite(2, 3), y, z) \
        & interval(complete_bipartite(2, 3), z, x)
    assert cert.intersection == common and len(common) != 1


def test_not_median_raises_with_certificate():
    with pytest.raises(NotMedianError) as info:
        as_median(cycle(6))
    assert info.value.certificate.witness == (0, 2, 4)
    with pytest.raises(ContractError):
        require_median(path(3))


def test_median_examples():
    g = as_median(grid(3, 3))
    assert median(g, 4, 4, 7) == 4
    assert median(g, v(g, 0, 1), v(g, 1, 0), v(g, 2, 2)) == v(g, 1, 1)
    p = as_median(path(3))
    assert median(p, 0, 1, 2) == 1


def test_cone_examples():
    p = path(3)
    assert cone(p, 0, 1) == {1, 2}
    assert cone(p, 1, 1) == {0, 1, 2}
    sq = cycle(4)
    assert cone(sq, 0, 1) == {1, 2}


def test_gate_projection_examples():
    g = as_median(grid(3, 3))
    right = {v(g, 2, j) for j in range(3)}
    x = v(g, 0, 1)
    assert gate_projection(g, right, x) == v(g, 2, 1) == nearest_point(g, right, x)
    assert gate_projection(g, {4, 5}, 4) == 4
    t = as_median(path(5))
    assert all(gate_projection(t, {2}, x) == 2 for x in range(5))


def test_convex_hull_examples():
    sq = as_median(cycle(4))
    assert convex_hull(sq, {0}) == {0}
    assert convex_hull(sq, {0, 2}) == {0, 1, 2, 3}
    assert convex_hull(sq, {0, 1}) == {0, 1}


@settings(max_examples=40, deadline=None)
@given(median_graphs())
def test_fast_check_agrees_with_bruteforce(g):
    assert bool(check_median(g)) == bool(check_median_bruteforce(g)) is True


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10_000), st.sampled_from([0.2, 0.4, 0.6]))
def test_random_graphs_agree_with_bruteforce(n, seed, p):
    from treelike.generators import random_graph
    g = random_graph(n, p, seed, connected=True)
    fast, slow = check_median(g), check_median_bruteforce(g)
    assert fast.accepted == slow.accepted
    if not fast:
        assert fast.witness == slow.witness


@settings(max_examples=30, deadline=None)
@given(median_graphs(), st.data())
def test_gate_characterization_and_homomorphism(g, data):
    n = g.vertex_count
    A = data.draw(st.sets(st.sampled_from(range(n)), min_size=1))
    H = convex_hull(g, A)
    assert is_convex(g, H)
    for x in range(n):
        p = gate_projection(g, A, x)
        assert p in H and all(p in interval(g, x, a) for a in H)
        assert p == nearest_point(g, H, x)
    pts = data.draw(st.lists(st.sampled_from(range(n)), min_size=3, max_size=3))
    x, y, z = pts
    proj = lambda w: gate_projection(g, A, w)  # noqa: E731
    assert proj(median(g, x, y, z)) == median(g, proj(x), proj(y), proj(z))


@settings(max_examples=30, deadline=None)
@given(median_graphs(), st.data())
def test_meet_law(g, data):
    x, y, z = (data.draw(st.sampled_from(range(g.vertex_count))) for _ in range(3))
    assert interval(g, x, y) & interval(g, x, z) == interval(g, x, median(g, x, y, z))


@settings(max_examples=30, deadline=None)
@given(median_graphs(), st.data())
def test_commuting_projections_and_helly(g, data):
    n = g.vertex_count
    pick = st.sets(st.sampled_from(range(n)), min_size=1, max_size=4)
    A = convex_hull(g, data.draw(pick))
    B = convex_hull(g, data.draw(pick))
    if A & B:
        for x in range(n):
            target = gate_projection(g, A & B, x)
            assert gate_projection(g, A, gate_projection(g, B, x)) == target
            assert gate_projection(g, B, gate_projection(g, A, x)) == target
    C = convex_hull(g, data.draw(pick))
    if A & B and B & C and A & C:
        assert A & B & C


@settings(max_examples=20, deadline=None)
@given(trees())
def test_trees_are_median(t):
    assert check_median(t)
    assert isinstance(t, MedianGraph)


def test_disconnected_median_graph_verified_per_component():
    g = Graph.from_edges(5, [(0, 1), (2, 3), (3, 4)])
    assert as_median(g).vertex_count == 5
    with pytest.raises(NotMedianError):
        as_median(Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]))


def test_median_of_all_triples_matches_intervals():
    g = as_median(hypercube(3))
    for x, y, z in combinations(range(8), 3):
        m = median(g, x, y, z)
        assert interval(g, x, y) & interval(g, y, z) & interval(g, z, x) == {m}
