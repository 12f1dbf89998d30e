"""Half-spaces and hyperplanes of median graphs.

Hyperplanes are the classes of the edge relation generated by opposite sides of
4-cycles.  Each class cuts the graph into two complementary half-spaces.
Half-space ids follow the lexicographically least oriented edge entering them;
unoriented hyperplane ids follow the least unoriented member edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from ._unionfind import UnionFind
from .errors import ContractError, DisconnectedError, InvariantViolation, NotMedianError
from .graph import BoundaryBundle, Edge, Graph, boundaries, is_convex
from .median import MedianGraph, cone, gate_projection, require_median


@dataclass(frozen=True, eq=False)
class HalfSpace:
    id: int
    side: frozenset[int]
    complement: int
    hyperplane: int | None
    boundary: BoundaryBundle
    ground: Graph = field(repr=False)
    trivial: bool = False

    @property
    def in_edges(self) -> tuple[Edge, ...]:
        return self.boundary.in_edges

    @property
    def vertex_boundary(self) -> frozenset[int]:
        return self.boundary.inner | self.boundary.outer

    def __contains__(self, v: int) -> bool:
        return v in self.side

    def __len__(self) -> int:
        return len(self.side)

    def __eq__(self, other) -> bool:
        return isinstance(other, HalfSpace) and self.side == other.side and self.ground == other.ground

    def __hash__(self) -> int:
        return hash(self.side)

    def complement_side(self) -> frozenset[int]:
        return self.ground.vertices - self.side


@dataclass(frozen=True)
class HyperplaneClass:
    """One orientation of a hyperplane: its edges oriented into ``halfspace``."""

    hyperplane: int
    edges: tuple[Edge, ...]
    halfspace: HalfSpace


class HalfspaceSystem:
    """All half-spaces of a connected median graph, computed once.

    ``membership[h, v]`` is true iff vertex ``v`` lies in half-space ``h``.
    Nontrivial half-spaces have ids ``0..2k-1``; when present the trivial pair
    ``∅, X`` follows at ``2k, 2k+1``.
    """

    def __init__(self, g: MedianGraph):
        require_median(g)
        if g.vertex_count and not g.is_connected():
            raise DisconnectedError("half-spaces are computed per component; split the graph first")
        self.graph = g
        classes = _edge_classes(g)
        raw = []
        for hp, edges in enumerate(classes):
            u, v = edges[0]
            for a, b in ((u, v), (v, u)):
                side = cone(g, a, b)
                bb = boundaries(g, side)
                if sorted(tuple(sorted(e)) for e in bb.in_edges) != list(edges):
                    raise NotMedianError(f"hyperplane class of edge {edges[0]} disagrees with its cone boundary")
                raw.append((bb.in_edges[0], hp, side, bb))
        raw.sort(key=lambda r: r[0])
        by_side = {r[2]: i for i, r in enumerate(raw)}
        n = g.vertex_count
        everything = frozenset(range(n))
        self.halfspaces: list[HalfSpace] = []
        for i, (_, hp, side, bb) in enumerate(raw):
            self.halfspaces.append(HalfSpace(i, side, by_side[everything - side], hp, bb, g))
        k = len(raw)
        self.empty = HalfSpace(k, frozenset(), k + 1, None, boundaries(g, ()), g, True)
        self.full = HalfSpace(k + 1, everything, k, None, boundaries(g, everything), g, True)
        self.hyperplane_edges: list[tuple[Edge, ...]] = classes
        sides: dict[int, list[int]] = {}
        for h in self.halfspaces:
            sides.setdefault(h.hyperplane, []).append(h.id)
        self.hyperplane_sides: list[tuple[int, int]] = [tuple(sorted(sides[i])) for i in range(len(classes))]
        self.membership = np.zeros((k, n), dtype=bool)
        for h in self.halfspaces:
            self.membership[h.id, list(h.side)] = True
        self._by_side = by_side
        self._nested = None

    def __len__(self) -> int:
        return len(self.halfspaces)

    @property
    def hyperplane_count(self) -> int:
        return len(self.hyperplane_edges)

    def all(self, include_trivial: bool = False) -> list[HalfSpace]:
        return self.halfspaces + ([self.empty, self.full] if include_trivial else [])

    def get(self, hid: int) -> HalfSpace:
        return self.all(True)[hid]

    def find(self, side: Iterable[int]) -> HalfSpace | None:
        side = frozenset(side)
        if not side:
            return self.empty
        if len(side) == self.graph.vertex_count:
            return self.full
        hid = self._by_side.get(side)
        return None if hid is None else self.halfspaces[hid]

    def complement(self, h: HalfSpace) -> HalfSpace:
        return self.get(h.complement)

    def containing(self, v: int) -> list[int]:
        """Ids of nontrivial half-spaces containing ``v`` (the principal orientation)."""
        return np.flatnonzero(self.membership[:, v]).tolist()

    def nested_matrix(self) -> np.ndarray:
        """Boolean matrix over nontrivial half-spaces: some corner is empty."""
        if self._nested is None:
            M = self.membership.astype(np.float32)  # exact counts, BLAS speed
            C = 1 - M
            corners = [M @ M.T, M @ C.T, C @ M.T, C @ C.T]
            self._nested = np.logical_or.reduce([c == 0 for c in corners])
        return self._nested


def halfspace_system(g: MedianGraph) -> HalfspaceSystem:
    require_median(g)
    sys_ = g._cache.get("halfspaces")
    if sys_ is None:
        sys_ = HalfspaceSystem(g)
        g._cache["halfspaces"] = sys_
    return sys_


def _squares(g: Graph):
    """Yield 4-cycles ``v - a - w - b`` with ``a < b`` and ``w != v``."""
    adj = g.adjacency
    nbr_sets = [set(nb) for nb in adj]
    for v in range(g.vertex_count):
        for a, b in combinations(adj[v], 2):
            for w in nbr_sets[a] & nbr_sets[b]:
                if w != v:
                    yield v, a, w, b


def _edge_classes(g: Graph) -> list[tuple[Edge, ...]]:
    uf = UnionFind(g.edges())

    def e(x, y):
        return (x, y) if x < y else (y, x)

    for v, a, w, b in _squares(g):
        uf.union(e(v, a), e(b, w))
        uf.union(e(v, b), e(a, w))
    return [tuple(c) for c in uf.groups()]


def hyperplane_classes(g: MedianGraph) -> list[HyperplaneClass]:
    """Both orientations of every hyperplane, ordered by half-space id."""
    system = halfspace_system(g)
    return [HyperplaneClass(h.hyperplane, h.in_edges, h) for h in system.halfspaces]


def halfspaces(g: MedianGraph, include_trivial: bool = False) -> list[HalfSpace]:
    return halfspace_system(g).all(include_trivial)


def _same_ground(h: HalfSpace, k: HalfSpace) -> None:
    if h.ground is not k.ground and h.ground != k.ground:
        raise ContractError("half-spaces live on different graphs")


def corners(h: HalfSpace, k: HalfSpace) -> dict[tuple[int, int], frozenset[int]]:
    """The four sets ``¬^a h ∩ ¬^b k`` keyed by ``(a, b)``."""
    _same_ground(h, k)
    X = h.ground.vertices
    hs = (h.side, X - h.side)
    ks = (k.side, X - k.side)
    return {(a, b): hs[a] & ks[b] for a, b in product((0, 1), repeat=2)}


def nested(h: HalfSpace, k: HalfSpace) -> bool:
    return any(not c for c in corners(h, k).values())


def separating_halfspaces(g: MedianGraph, x: int, y: int) -> list[HalfSpace]:
    """Half-spaces containing ``y`` but not ``x``, by id."""
    system = halfspace_system(g)
    g.check_vertex(x)
    g.check_vertex(y)
    M = system.membership
    return [system.halfspaces[i] for i in np.flatnonzero(M[:, y] & ~M[:, x])]


def is_successor(k: HalfSpace, h: HalfSpace) -> bool:
    """``k`` is a successor of ``h``: ``k ⊇ h`` and ``∂_iv k`` meets ``∂_ov h``."""
    _same_ground(h, k)
    if h.trivial or k.trivial:
        return False
    return h.side <= k.side and bool(k.boundary.inner & h.boundary.outer)


def successors(g: MedianGraph, h: HalfSpace) -> list[HalfSpace]:
    if h.trivial:
        raise ContractError("successors are defined for nontrivial half-spaces only")
    return [k for k in halfspace_system(g).halfspaces if is_successor(k, h)]


@dataclass(frozen=True)
class HyperplaneAdjacency:
    graph: Graph
    by_boundary: frozenset[tuple[int, int]]
    by_order: frozenset[tuple[int, int]]


def hyperplane_adjacency(g: MedianGraph) -> HyperplaneAdjacency:
    """Adjacency of unoriented hyperplanes, computed two ways and cross-checked.

    One way intersects vertex boundaries; the other uses non-nestedness and the
    successor relation among the four orientations.
    """
    system = halfspace_system(g)
    k = system.hyperplane_count
    rep = [system.halfspaces[system.hyperplane_sides[i][0]] for i in range(k)]
    nest = system.nested_matrix()
    by_boundary, by_order = set(), set()
    for i, j in combinations(range(k), 2):
        h, kk = rep[i], rep[j]
        if h.vertex_boundary & kk.vertex_boundary:
            by_boundary.add((i, j))
        hs = (h, system.complement(h))
        ks = (kk, system.complement(kk))
        if not nest[h.id, kk.id] or any(is_successor(a, b) or is_successor(b, a) for a in hs for b in ks):
            by_order.add((i, j))
    if by_boundary != by_order:
        diff = sorted(by_boundary ^ by_order)
        raise InvariantViolation(f"hyperplane adjacency disagreement on pairs {diff[:5]}")
    adj_graph = Graph.from_edges(k, sorted(by_boundary))
    return HyperplaneAdjacency(adj_graph, frozenset(by_boundary), frozenset(by_order))


def separate_convex(g: MedianGraph, A: Iterable[int], B: Iterable[int]) -> HalfSpace:
    """A half-space ``H`` with ``A ⊆ H ⊆ ¬B`` from the first edge of a shortest A-B geodesic."""
    require_median(g)
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise ContractError("separate_convex needs nonempty sets")
    if set(A) & set(B):
        raise ContractError("sets to separate must be disjoint")
    for S in (A, B):
        res = is_convex(g, S)
        if not res:
            raise ContractError(f"set is not convex, witness {res.witness}")
    D = g.distances
    sub = D[np.ix_(A, B)]
    if (sub < 0).all():
        raise DisconnectedError("sets lie in different components")
    dist = int(sub[sub >= 0].min())
    i, j = np.argwhere(sub == dist)[0]
    x0, xn = A[int(i)], B[int(j)]
    x1 = min(w for w in g.adjacency[x0] if D[w, xn] == dist - 1)
    side = cone(g, x1, x0)
    h = halfspace_system(g).find(side)
    if h is None or not (set(A) <= side and not side & set(B)):
        raise InvariantViolation("separating cone failed to separate")
    return h


def cube_embedding(g: MedianGraph, hs: Sequence[HalfSpace]) -> dict[tuple[int, ...], int]:
    """Embed the Hamming cube {0,1}^n along pairwise non-nested half-spaces.

    The cube point ``a`` lands in ``¬^{a_0} H_0 ∩ ... ∩ ¬^{a_{n-1}} H_{n-1}``
    (``¬^0 H = H``).  Start from the least vertex outside every ``H_i``, project
    it onto ``∩ H_i`` to get the base corner, then project the base corner onto
    each corner intersection.
    """
    require_median(g)
    n = len(hs)
    for a, b in combinations(range(n), 2):
        if nested(hs[a], hs[b]):
            raise ContractError(f"half-spaces {hs[a].id} and {hs[b].id} are nested")
    X = g.vertices
    if n == 0:
        return {(): 0}
    outside = X.difference(*(h.side for h in hs))
    if not outside:
        raise InvariantViolation("pairwise non-nested half-spaces with empty common complement")
    start = min(outside)
    inside = frozenset.intersection(*(h.side for h in hs))
    base = gate_projection(g, inside, start)
    out: dict[tuple[int, ...], int] = {}
    for bits in product((0, 1), repeat=n):
        region = X
        for bit, h in zip(bits, hs):
            region = region & (h.side if bit == 0 else X - h.side)
        out[bits] = gate_projection(g, region, base)
    D = g.distances
    for a, b in combinations(out, 2):
        if D[out[a], out[b]] != sum(p != q for p, q in zip(a, b)):
            raise InvariantViolation(f"cube embedding not isometric at {a}, {b}")
    return out
