"""Tree decompositions as relations between a host graph and a skeleton tree.

``images[x]`` is the set of skeleton nodes related to host vertex ``x``; the
bag of a skeleton node ``y`` is the set of host vertices whose image holds ``y``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .cuts import CutFamily
from .errors import InvariantViolation, TreeDecompositionError
from .graph import Graph, boundaries, components


@dataclass(frozen=True)
class WidthReport:
    width: int
    bag_sizes: tuple[int, ...]


@dataclass(frozen=True)
class TreeDecomposition:
    host: Graph
    skeleton: Graph
    images: tuple[frozenset[int], ...]
    skeleton_labels: tuple[str, ...] | None = None

    def bag(self, y: int) -> frozenset[int]:
        return self.bags()[y]

    def bags(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.skeleton.vertex_count)]
        for x, img in enumerate(self.images):
            for y in img:
                out[y].add(x)
        return tuple(frozenset(b) for b in out)

    @property
    def width(self) -> int:
        return width_report(self).width

    def labels(self) -> tuple[str, ...]:
        if self.skeleton_labels is not None:
            return self.skeleton_labels
        return tuple(str(y) for y in range(self.skeleton.vertex_count))

    def to_dict(self) -> dict:
        labels = self.labels()
        return {"skeleton_edges": [[labels[a], labels[b]] for a, b in self.skeleton.edges()],
                "bags": {labels[y]: sorted(b) for y, b in enumerate(self.bags())}}


def width_report(td: TreeDecomposition) -> WidthReport:
    sizes = tuple(len(b) for b in td.bags())
    return WidthReport(max(sizes, default=0) - 1, sizes)


def _check_tree(t: Graph) -> None:
    n = t.vertex_count
    if n == 0:
        raise TreeDecompositionError("skeleton-tree", "skeleton has no nodes")
    if t.edge_count != n - 1 or not t.is_connected():
        raise TreeDecompositionError("skeleton-tree", f"skeleton with {n} nodes and {t.edge_count} edges "
                                     f"in {len(t.connected_components())} pieces is not a tree")


def validate(host: Graph, skeleton: Graph, bags: Mapping[int, Iterable[int]] | Sequence[Iterable[int]],
             skeleton_labels: Sequence[str] | None = None) -> tuple[TreeDecomposition, WidthReport]:
    """Check the decomposition clauses; raises :class:`TreeDecompositionError` naming the first failure."""
    _check_tree(skeleton)
    items = bags.items() if isinstance(bags, Mapping) else enumerate(bags)
    images: list[set[int]] = [set() for _ in range(host.vertex_count)]
    for y, bag in items:
        y = int(y)
        if not 0 <= y < skeleton.vertex_count:
            raise TreeDecompositionError("format", f"bag for unknown skeleton node {y}")
        for x in bag:
            if not 0 <= int(x) < host.vertex_count:
                raise TreeDecompositionError("format", f"bag {y} holds unknown host vertex {x}", x)
            images[int(x)].add(y)
    for x, img in enumerate(images):
        if not img:
            raise TreeDecompositionError("image-nonempty", f"host vertex {x} lies in no bag", x)
        if len(components(skeleton, img)) != 1:
            raise TreeDecompositionError("image-connected", f"bags holding host vertex {x} are not "
                                         "connected in the skeleton", x)
    for u, v in host.edges():
        if not images[u] & images[v]:
            raise TreeDecompositionError("edge-covered", f"host edge ({u}, {v}) lies in no bag", (u, v))
    labels = tuple(skeleton_labels) if skeleton_labels is not None else None
    td = TreeDecomposition(host, skeleton, tuple(frozenset(i) for i in images), labels)
    return td, width_report(td)


def revalidate(td: TreeDecomposition) -> WidthReport:
    return validate(td.host, td.skeleton, [sorted(b) for b in td.bags()], td.skeleton_labels)[1]


def tree_hull(t: Graph, points: Iterable[int]) -> frozenset[int]:
    """Smallest subtree containing ``points``."""
    pts = sorted(set(points))
    if not pts:
        return frozenset()
    root = pts[0]
    parent = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in t.adjacency[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    hull = {root}
    for p in pts[1:]:
        while p not in hull:
            hull.add(p)
            p = parent[p]
    return frozenset(hull)


def shrink_bags(td: TreeDecomposition) -> TreeDecomposition:
    """Per host vertex in id order, cut its image down to the hull of one shared node per closed neighbour.

    The shared node with each ``y`` in ``Ball_1(x)`` is the least node of the
    current ``F(x) ∩ F(y)``; updates are visible to later vertices.
    """
    images = [set(i) for i in td.images]
    for x in range(td.host.vertex_count):
        picks = [min(images[x] & images[y]) for y in (x, *td.host.adjacency[x])]
        images[x] = set(tree_hull(td.skeleton, picks))
    out = TreeDecomposition(td.host, td.skeleton, tuple(frozenset(i) for i in images), td.skeleton_labels)
    revalidate(out)
    return out


def skeleton_cone(t: Graph, y: int, y2: int) -> frozenset[int]:
    """Nodes of the tree on ``y2``'s side of the edge ``(y, y2)``."""
    seen = {y2}
    queue = deque([y2])
    while queue:
        v = queue.popleft()
        for w in t.adjacency[v]:
            if w != y and w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def _preimage(td: TreeDecomposition, nodes: frozenset[int]) -> frozenset[int]:
    return frozenset(x for x, img in enumerate(td.images) if img & nodes)


def prune_skeleton(td: TreeDecomposition) -> TreeDecomposition:
    """Remove skeleton cones whose preimage sits inside the bag at their root, until none is removable."""
    cur = td
    while True:
        bags = cur.bags()
        removed = None
        for y, y2 in sorted(e for a, b in cur.skeleton.edges() for e in ((a, b), (b, a))):
            cone = skeleton_cone(cur.skeleton, y, y2)
            if _preimage(cur, cone) <= bags[y]:
                removed = cone
                break
        if removed is None:
            break
        keep = [v for v in range(cur.skeleton.vertex_count) if v not in removed]
        sub, old = cur.skeleton.induced_subgraph(keep)
        new_id = {v: i for i, v in enumerate(old)}
        images = tuple(frozenset(new_id[y] for y in img if y in new_id) for img in cur.images)
        labels = cur.labels()
        cur = TreeDecomposition(cur.host, sub, images, tuple(labels[v] for v in old))
    revalidate(cur)
    return cur


def partition_law(td: TreeDecomposition, y: int) -> dict[int, frozenset[int]]:
    """Pieces ``F⁻¹(cone_y y') ∖ F⁻¹(y)`` over neighbours ``y'``; asserts they partition ``X ∖ F⁻¹(y)``."""
    bag = td.bag(y)
    rest = td.host.vertices - bag
    pieces = {y2: _preimage(td, skeleton_cone(td.skeleton, y, y2)) - bag for y2 in td.skeleton.adjacency[y]}
    covered: set[int] = set()
    for piece in pieces.values():
        if covered & piece:
            raise InvariantViolation(f"pieces around skeleton node {y} overlap")
        covered |= piece
    if covered != rest:
        raise InvariantViolation(f"pieces around skeleton node {y} miss vertices")
    return pieces


def treedec_cuts(td: TreeDecomposition, close: bool = False) -> CutFamily:
    """Components of ``X ∖ F⁻¹(y)`` over all nodes ``y``; each has outer boundary inside the bag."""
    sides = []
    g = td.host
    for y, bag in enumerate(td.bags()):
        partition_law(td, y)
        for comp in components(g, g.vertices - bag):
            if not boundaries(g, comp).outer <= bag:
                raise InvariantViolation(f"cut outer boundary escapes bag {y}")
            sides.append(comp)
    return CutFamily.from_sides(g, sides, "treedec", close)


def heuristic_treedec(g: Graph) -> TreeDecomposition:
    """Min-degree elimination, ties to the least id; roots of separate pieces are chained."""
    n = g.vertex_count
    if n == 0:
        return TreeDecomposition(g, Graph([[]]), ())
    nbrs = [set(a) for a in g.adjacency]
    alive = set(range(n))
    order, bags = [], []
    while alive:
        v = min(alive, key=lambda u: (len(nbrs[u]), u))
        nb = nbrs[v]
        order.append(v)
        bags.append(frozenset(nb | {v}))
        for a in nb:
            nbrs[a] |= nb - {a}
            nbrs[a].discard(v)
        alive.discard(v)
        nbrs[v] = set()
    position = {v: i for i, v in enumerate(order)}
    edges, roots = [], []
    for i, v in enumerate(order):
        later = [position[u] for u in bags[i] if u != v]
        if later:
            edges.append((i, min(later)))
        else:
            roots.append(i)
    edges += [(roots[k], roots[k + 1]) for k in range(len(roots) - 1)]
    skeleton = Graph.from_edges(n, edges)
    td, _ = validate(g, skeleton, bags)
    return td
