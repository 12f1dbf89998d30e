from itertools import combinations, product

import pytest
from hypothesis import given, settings

from strategies import median_graphs, trees, wallings
from treelike.errors import CapExceededError, PocsetError
from treelike.generators import grid, hypercube, path
from treelike.graph import Graph
from treelike.median import as_median, check_median, median
from treelike.pocset import (Walling, blocks, dual_median_graph, halfspace_pocset, orientation_distance,
                             orientation_median, orientations, proper_walling_report, roundtrip_graph,
                             roundtrip_pocset, simple_pocset, validate_pocset, wall_dual, walling_pocset)


def brute_orientations(p):
    """Every sign choice over complement pairs that is upward closed."""
    reps = p.representatives
    out = set()
    for signs in product((0, 1), repeat=len(reps)):
        chosen = {a if s == 0 else p.neg[a] for a, s in zip(reps, signs)}
        if all(q in chosen for c in chosen for q in range(p.size) if p.leq[c, q]):
            out.add(sum(1 << c for c in chosen))
    return out


def chain(n):
    # p_0 <= p_1 <= ... <= p_{n-1}
    return simple_pocset(n, [(2 * i + 2, 2 * i + 4) for i in range(n - 1)])


def test_validate_examples():
    p = simple_pocset(0)
    assert p.size == 2 and p.zero == 0 and p.one == 1
    q = validate_pocset({"elements": ["0", "1", "p", "q"], "involution": [["0", "1"], ["p", "q"]]})
    assert q.size == 4 and not q.le(2, 3)
    with pytest.raises(PocsetError) as exc:
        validate_pocset({"elements": ["0", "1", "p", "q"], "involution": [["0", "1"], ["p", "q"]],
                         "order": [["p", "q"]]})
    assert exc.value.axiom == "lower-bound"
    with pytest.raises(PocsetError) as exc:
        validate_pocset({"elements": ["0", "1", "p"], "involution": [["0", "1"], ["p", "p"]]})
    assert exc.value.axiom == "fixpoint-free"


def test_validate_other_axioms():
    base = {"elements": ["0", "1", "p", "q", "r", "s"], "involution": [["0", "1"], ["p", "q"], ["r", "s"]]}
    with pytest.raises(PocsetError) as exc:
        validate_pocset(dict(base, order=[["p", "r"], ["r", "p"]]))
    assert exc.value.axiom == "antisymmetry"
    with pytest.raises(PocsetError) as exc:
        validate_pocset(dict(base, order=[["p", "r"]]), close=False)
    assert exc.value.axiom == "order-reversing"
    with pytest.raises(PocsetError) as exc:
        validate_pocset({"elements": ["a", "b", "c"], "involution": [["a", "b"]]})
    assert exc.value.axiom == "involution"


def test_orientation_examples():
    assert len(orientations(simple_pocset(0))) == 1
    assert len(orientations(simple_pocset(1))) == 2
    assert len(orientations(simple_pocset(2))) == 4
    le = simple_pocset(2, [(2, 4)])
    found = orientations(le)
    assert len(found) == 3
    names = {frozenset(le.names[i] for i in range(le.size) if U >> i & 1) - {"1"} for U in found}
    assert names == {frozenset({"p0", "p1"}), frozenset({"¬p0", "p1"}), frozenset({"¬p0", "¬p1"})}


def test_cap_refuses_partial():
    with pytest.raises(CapExceededError):
        orientations(simple_pocset(5), cap=10)


def test_dual_examples():
    for n in range(5):
        d = dual_median_graph(simple_pocset(n)).graph
        assert d.vertex_count == 2 ** n and d.edge_count == n * 2 ** max(n - 1, 0)
        assert sorted(d.degree(v) for v in range(d.vertex_count)) == [n] * 2 ** n
    for n in range(1, 6):
        d = dual_median_graph(chain(n)).graph
        assert d.vertex_count == n + 1 and d.edge_count == n and max(map(d.degree, range(n + 1))) <= 2
    assert dual_median_graph(simple_pocset(1)).graph.edge_count == 1


def test_halfspace_pocset_examples():
    hp = halfspace_pocset(as_median(path(3))).pocset
    assert hp.pair_count - 1 == 2
    nontrivial = [p for p in range(hp.size) if p not in (hp.zero, hp.one)]
    assert len(nontrivial) == 4
    strict = [(a, b) for a in nontrivial for b in nontrivial if a != b and hp.le(a, b)]
    assert len(strict) == 2
    q2 = halfspace_pocset(as_median(hypercube(2))).pocset
    nt = [p for p in range(q2.size) if p not in (q2.zero, q2.one)]
    assert len(nt) == 4
    assert not any(q2.le(a, b) for a in nt for b in nt if a != b)
    e = halfspace_pocset(as_median(path(2))).pocset
    assert e.size == 4 and len(orientations(e)) == 2


def test_roundtrip_examples():
    assert roundtrip_graph(as_median(hypercube(3)))
    assert roundtrip_graph(as_median(path(1))).mapping == (0,)
    for n in (0, 2):
        assert roundtrip_pocset(simple_pocset(n))
    assert roundtrip_pocset(chain(4))


def test_blocks_examples():
    w = Walling.build([1, 2, 3], [[1], [2, 3]])
    assert blocks(w).blocks == (frozenset({0}), frozenset({1, 2}))
    assert blocks(w).representative == (0, 1, 1)
    pre = Walling.build(range(5), [range(k) for k in range(6)])
    assert len(blocks(pre).blocks) == 5
    assert len(blocks(Walling.build(range(5), [])).blocks) == 1


def test_wall_dual_examples():
    pre = wall_dual(Walling.build([1, 2, 3, 4], [[1], [1, 2], [1, 2, 3]]))
    g = pre.dual.graph
    assert g.vertex_count == 4 and g.edge_count == 3 and len(set(pre.point_map)) == 4
    cross = wall_dual(Walling.build("abcd", [["a", "b"], ["a", "c"]]))
    assert cross.dual.graph.vertex_count == 4 and cross.dual.graph.edge_count == 4
    assert wall_dual(Walling.build("abc", [])).dual.graph.vertex_count == 1


def test_proper_report_examples():
    r = proper_walling_report(Walling.build(range(5), [range(k) for k in range(6)]))
    assert (r.max_block_size, r.max_non_nested) == (1, 0)
    r = proper_walling_report(Walling.build("abcd", [["a", "b"], ["a", "c"]]))
    assert r.max_non_nested == 1
    r = proper_walling_report(Walling.build(range(5), []))
    assert (r.block_count, r.max_block_size) == (1, 5)


@settings(max_examples=40, deadline=None)
@given(wallings())
def test_orientations_match_bruteforce(gw):
    p = walling_pocset(Walling.build(*gw))
    assert set(orientations(p)) == brute_orientations(p)


@settings(max_examples=40, deadline=None)
@given(wallings())
def test_dual_metric_and_median_laws(gw):
    d = dual_median_graph(walling_pocset(Walling.build(*gw)))
    g, Us = d.graph, d.orientations
    assert check_median(g)
    D = g.distances
    for i, j in combinations(range(len(Us)), 2):
        assert D[i, j] == orientation_distance(Us[i], Us[j])
    for i, j, k in combinations(range(len(Us)), 3):
        assert d.vertex_of(orientation_median(Us[i], Us[j], Us[k])) == median(g, i, j, k)


@settings(max_examples=40, deadline=None)
@given(wallings())
def test_pocset_roundtrip_random(gw):
    assert roundtrip_pocset(walling_pocset(Walling.build(*gw)))


@settings(max_examples=30, deadline=None)
@given(median_graphs(cap=48))
def test_graph_roundtrip_random(g):
    assert roundtrip_graph(g)


@settings(max_examples=30, deadline=None)
@given(trees(max_vertices=10))
def test_graph_roundtrip_trees(g):
    assert roundtrip_graph(g)


@settings(max_examples=30, deadline=None)
@given(wallings())
def test_wall_dual_counts_and_blocks(gw):
    w = Walling.build(*gw)
    wd = wall_dual(w)
    assert wd.dual.graph.vertex_count == len(orientations(wd.pocset))
    part = blocks(w)
    for x, y in combinations(range(w.size), 2):
        assert (wd.point_map[x] == wd.point_map[y]) == (part.representative[x] == part.representative[y])


@settings(max_examples=20, deadline=None)
@given(median_graphs(cap=32))
def test_halfspace_walling_quotient(g):
    from treelike.hyperplanes import halfspaces
    w = Walling.build(g.labels, [[g.label(v) for v in h.side] for h in halfspaces(g)])
    assert len(blocks(w).blocks) == g.vertex_count
    wd = wall_dual(w)
    assert wd.dual.graph.vertex_count == g.vertex_count
    for a, b in g.edges():
        assert wd.dual.graph.has_edge(wd.point_map[a], wd.point_map[b])


def test_grid_roundtrip():
    assert roundtrip_graph(as_median(grid(3, 4)))
    assert isinstance(roundtrip_graph(as_median(Graph.from_edges(1, []))).mapping, tuple)
