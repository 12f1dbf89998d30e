import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import graphs, trees
from treelike.errors import TreeDecompositionError
from treelike.generators import complete, cycle, grid, path, random_tree
from treelike.graph import Graph, boundaries, components
from treelike.treedec import (TreeDecomposition, heuristic_treedec, partition_law, prune_skeleton, shrink_bags,
                              treedec_cuts, validate, width_report)


def independent_valid(td):
    """Decomposition clauses checked with networkx."""
    sk = nx.Graph()
    sk.add_nodes_from(range(td.skeleton.vertex_count))
    sk.add_edges_from(td.skeleton.edges())
    if not nx.is_tree(sk):
        return False
    bags = td.bags()
    for x in range(td.host.vertex_count):
        img = [y for y in range(len(bags)) if x in bags[y]]
        if not img or not nx.is_connected(sk.subgraph(img)):
            return False
    return all(any(u in b and v in b for b in bags) for u, v in td.host.edges())


def c4_td():
    g = cycle(4)  # a=0, b=1, c=2, d=3
    return validate(g, path(2), [[0, 1, 2], [0, 2, 3]])


def test_validate_examples():
    td, rep = c4_td()
    assert rep.width == 2 and rep.bag_sizes == (3, 3)
    t = path(4)  # edges 01, 12, 23 on a path skeleton
    td, rep = validate(t, path(3), [[0, 1], [1, 2], [2, 3]])
    assert rep.width == 1
    with pytest.raises(TreeDecompositionError) as exc:
        validate(cycle(4), path(2), [[0, 1, 2], [2, 3]])
    assert exc.value.clause == "edge-covered" and exc.value.witness == (0, 3)


def test_validate_clauses():
    with pytest.raises(TreeDecompositionError) as exc:
        validate(path(2), cycle(3), [[0, 1], [0], [1]])
    assert exc.value.clause == "skeleton-tree"
    with pytest.raises(TreeDecompositionError) as exc:
        validate(path(3), path(2), [[0, 1], [1]])
    assert exc.value.clause == "image-nonempty" and exc.value.witness == 2
    with pytest.raises(TreeDecompositionError) as exc:
        validate(path(2), path(3), [[0, 1], [1], [0]])
    assert exc.value.clause == "image-connected" and exc.value.witness == 0


def test_shrink_examples():
    td, _ = c4_td()
    assert shrink_bags(td).images == td.images
    t = path(3)
    fat, _ = validate(t, path(3), [[0, 1], [0, 1, 2], [1, 2]])
    # vertex 0 sits in node 1 for no reason
    thin = shrink_bags(fat)
    assert thin.images[0] == frozenset({0}) and independent_valid(thin)
    one, _ = validate(Graph.from_edges(1, []), path(3), [[0], [0], [0]])
    assert len(shrink_bags(one).images[0]) == 1


def test_prune_examples():
    g = path(2)
    td, _ = validate(g, path(3), {0: [0, 1], 1: [1]})
    pruned = prune_skeleton(td)
    assert pruned.skeleton.vertex_count < 3 and independent_valid(pruned)
    c, _ = c4_td()
    assert prune_skeleton(c).skeleton.vertex_count == 2
    same, _ = validate(path(3), path(3), [[0, 1], [1, 2], [1, 2]])
    out = prune_skeleton(same)
    assert out.skeleton.vertex_count == 2 and out.labels() == ("0", "1")


def test_cut_examples():
    td, _ = c4_td()
    fam = treedec_cuts(td)
    d_cut = [c for c in fam if c.side == frozenset({3})]
    assert d_cut and d_cut[0].boundary.outer == frozenset({0, 2})
    p = path(4)
    ptd, _ = validate(p, path(3), [[0, 1], [1, 2], [2, 3]])
    assert treedec_cuts(ptd).sides() == {frozenset({0}), frozenset({3}), frozenset({2, 3}), frozenset({0, 1})}
    whole, _ = validate(complete(3), path(1), [[0, 1, 2]])
    assert len(treedec_cuts(whole)) == 0


def test_heuristic_examples():
    assert heuristic_treedec(random_tree(30, 4)).width == 1
    for n in range(4, 9):
        assert heuristic_treedec(cycle(n)).width == 2
    for n in range(1, 7):
        assert heuristic_treedec(complete(n)).width == n - 1
    assert heuristic_treedec(Graph.from_edges(3, [])).width == 0


@settings(max_examples=50, deadline=None)
@given(graphs(12))
def test_heuristic_is_valid(g):
    td = heuristic_treedec(g)
    assert independent_valid(td)
    if g.vertex_count:
        h = nx.Graph(g.edges())
        h.add_nodes_from(range(g.vertex_count))
        lower = max(1, nx.node_connectivity(h)) if g.edge_count and nx.is_connected(h) else 0
        assert td.width >= min(lower, g.vertex_count - 1)


@settings(max_examples=50, deadline=None)
@given(graphs(12, connected=True))
def test_shrink_prune_keep_validity_and_width(g):
    td = heuristic_treedec(g)
    for step in (shrink_bags, prune_skeleton):
        out = step(td)
        assert independent_valid(out)
        assert out.width <= td.width
    s = shrink_bags(td)
    assert all(a <= b for a, b in zip(s.images, td.images))


@settings(max_examples=40, deadline=None)
@given(graphs(12, connected=True), st.integers(0, 3))
def test_inflated_decomposition_shrinks(g, extra):
    td = heuristic_treedec(g)
    # grow every image by its skeleton neighbours, a few times
    images = [set(i) for i in td.images]
    for _ in range(extra):
        images = [i | {w for y in i for w in td.skeleton.adjacency[y]} for i in images]
    bags = [[x for x in range(g.vertex_count) if y in images[x]] for y in range(td.skeleton.vertex_count)]
    fat, _ = validate(g, td.skeleton, bags)
    thin = shrink_bags(fat)
    assert independent_valid(thin) and thin.width <= fat.width
    assert all(a <= b for a, b in zip(thin.images, fat.images))


@settings(max_examples=50, deadline=None)
@given(graphs(12, connected=True))
def test_cut_laws_and_partition(g):
    td = heuristic_treedec(g)
    bags = td.bags()
    w = width_report(td).width
    for y in range(len(bags)):
        pieces = partition_law(td, y)
        assert set().union(*pieces.values()) == g.vertices - bags[y] if pieces else bags[y] == g.vertices
    for c in treedec_cuts(td):
        assert len(components(g, c.side)) == 1
        assert any(boundaries(g, c.side).outer <= b for b in bags)
        assert c.outer_count <= w + 1


def test_grid_width():
    td = heuristic_treedec(grid(4, 4))
    assert independent_valid(td) and 4 <= td.width <= 6
    assert isinstance(td, TreeDecomposition)


@settings(max_examples=20, deadline=None)
@given(trees(20))
def test_tree_width_one(t):
    assert heuristic_treedec(t).width == (1 if t.vertex_count > 1 else 0)
