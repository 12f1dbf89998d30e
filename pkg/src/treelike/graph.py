"""Finite simple graphs: metrics, intervals, convexity and boundary operators.

Vertices are dense integer ids ``0..n-1``; arbitrary input labels are kept in a
symbol table (``Graph.labels``).  Vertex sets are plain ``frozenset[int]``.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import DisconnectedError, GraphFormatError, InvalidVertexError

VertexSet = frozenset
Edge = tuple[int, int]

#: distance-matrix entry for vertex pairs in different components
UNREACHABLE = -1


class Graph:
    """Immutable finite simple undirected graph.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.  All-pairs
    distances are computed on first use and memoized.
    """

    __slots__ = ("_adj", "_labels", "_dist", "_comp", "_lock", "__weakref__")

    def __init__(self, adjacency: Sequence[Iterable[int]], labels: Sequence[str] | None = None):
        adj = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        n = len(adj)
        for v, nbrs in enumerate(adj):
            for w in nbrs:
                if not 0 <= w < n:
                    raise GraphFormatError(f"neighbour {w} of {v} is not a vertex")
                if w == v:
                    raise GraphFormatError(f"self-loop at {v}")
                if v not in adj[w]:
                    raise GraphFormatError(f"adjacency not symmetric at ({v}, {w})")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise GraphFormatError("label count differs from vertex count")
            if len(set(labels)) != n:
                raise GraphFormatError("duplicate vertex labels")
        self._adj = adj
        self._labels = labels
        self._dist = None
        self._comp = None
        self._lock = threading.Lock()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels: Sequence[str] | None = None,
                   *, strict: bool = True) -> "Graph":
        """Build from an edge list; ``strict`` rejects duplicate edges."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphFormatError(f"self-loop at {u}")
            if v in nbrs[u]:
                if strict:
                    raise GraphFormatError(f"duplicate edge ({u}, {v})")
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(nbrs, labels)

    # -- basic structure --------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    def __len__(self) -> int:
        return len(self._adj)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    @property
    def labels(self) -> tuple[str, ...]:
        if self._labels is None:
            return tuple(str(v) for v in range(len(self._adj)))
        return self._labels

    @property
    def has_labels(self) -> bool:
        return self._labels is not None

    def label(self, v: int) -> str:
        return self.labels[v]

    def vertex_of(self, label) -> int:
        """Inverse of :meth:`label`; integers are accepted as ids."""
        labels = self.labels
        s = str(label)
        try:
            return labels.index(s)
        except ValueError:
            pass
        if isinstance(label, int) and 0 <= label < len(self._adj):
            return label
        raise InvalidVertexError(f"no vertex labelled {label!r}")

    def neighbors(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def edges(self) -> list[Edge]:
        """Unoriented edges as ``(u, v)`` with ``u < v``, sorted."""
        return [(u, v) for u, nb in enumerate(self._adj) for v in nb if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def check_vertex(self, v) -> None:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < len(self._adj):
            raise InvalidVertexError(f"{v!r} is not a vertex id of a graph on {len(self._adj)} vertices")

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(range(len(self._adj)))

    def __repr__(self) -> str:
        return f"Graph(n={self.vertex_count}, m={self.edge_count})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(self._adj)

    # -- metric -----------------------------------------------------------

    @property
    def distances(self) -> np.ndarray:
        """All-pairs distance matrix; ``UNREACHABLE`` across components."""
        if self._dist is None:
            with self._lock:
                if self._dist is None:
                    self._dist = self._all_pairs()
        return self._dist

    def _all_pairs(self) -> np.ndarray:
        n = len(self._adj)
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        rows = [u for u, nb in enumerate(self._adj) for _ in nb]
        cols = [v for nb in self._adj for v in nb]
        mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        d = shortest_path(mat, unweighted=True, directed=False)
        out = np.where(np.isinf(d), UNREACHABLE, d).astype(np.int64)
        out.setflags(write=False)
        return out

    def distance(self, x: int, y: int) -> int:
        """Path distance; raises if ``x`` and ``y`` are not connected."""
        d = int(self.distances[x, y])
        if d == UNREACHABLE:
            raise DisconnectedError(f"{x} and {y} lie in different components")
        return d

    def connected_components(self) -> list[frozenset[int]]:
        """Components sorted by least vertex id."""
        if self._comp is None:
            with self._lock:
                if self._comp is None:
                    self._comp = tuple(_flood(self._adj, range(len(self._adj))))
        return list(self._comp)

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1

    def component_of(self, v: int) -> frozenset[int]:
        self.check_vertex(v)
        for c in self.connected_components():
            if v in c:
                return c
        raise AssertionError("unreachable")

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Subgraph on ``vertices`` with dense ids; returns it and the old ids."""
        old = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(old)}
        nbrs = [[index[w] for w in self._adj[v] if w in index] for v in old]
        labels = [self.labels[v] for v in old] if self._labels is not None else [str(v) for v in old]
        return Graph(nbrs, labels), old


def _flood(adj, universe: Iterable[int]) -> list[frozenset[int]]:
    allowed = set(universe)
    seen: set[int] = set()
    out = []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        out.append(frozenset(comp))
    return out


def disjoint_union(*graphs: Graph) -> Graph:
    """Disjoint union; vertices of later graphs are shifted past earlier ones."""
    nbrs: list[list[int]] = []
    labels: list[str] = []
    offset = 0
    for i, g in enumerate(graphs):
        nbrs.extend([w + offset for w in nb] for nb in g.adjacency)
        labels.extend(f"{i}:{s}" for s in g.labels)
        offset += g.vertex_count
    return Graph(nbrs, labels)


# -- operations -----------------------------------------------------------

def bfs_distances(g: Graph, source: int) -> list[int | None]:
    """Distances from ``source``; ``None`` marks unreachable vertices."""
    g.check_vertex(source)
    dist: list[int | None] = [None] * g.vertex_count
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if dist[w] is None:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def interval_mask(g: Graph, x: int, y: int) -> np.ndarray:
    D = g.distances
    dxy = D[x, y]
    if dxy == UNREACHABLE:
        raise DisconnectedError(f"{x} and {y} lie in different components")
    return (D[x] >= 0) & (D[x] + D[y] == dxy)


def interval(g: Graph, x: int, y: int) -> frozenset[int]:
    """All vertices on some geodesic between ``x`` and ``y``."""
    g.check_vertex(x)
    g.check_vertex(y)
    return frozenset(np.flatnonzero(interval_mask(g, x, y)).tolist())


def is_between(g: Graph, x: int, z: int, y: int) -> bool:
    """``z`` lies on a geodesic from ``x`` to ``y``."""
    D = g.distances
    return D[x, y] != UNREACHABLE and D[x, z] + D[z, y] == D[x, y]


@dataclass(frozen=True)
class ConvexityResult:
    convex: bool
    witness: tuple[int, int, int | None] | None = None

    def __bool__(self) -> bool:
        return self.convex


def is_convex(g: Graph, A: Iterable[int]) -> ConvexityResult:
    """Check geodesic convexity; failing witness is ``(x, y, z)`` with ``z`` in ``[x, y]`` but not in ``A``.

    The witness is the lexicographically least such triple.
    """
    A = sorted(set(A))
    if len(A) <= 1:
        return ConvexityResult(True)
    D = g.distances
    members = np.zeros(g.vertex_count, dtype=bool)
    members[A] = True
    rows = np.asarray(A)
    for i, x in enumerate(A):
        ys = rows[i + 1:]
        if len(ys) == 0:
            break
        dxy = D[x, ys]
        if (dxy == UNREACHABLE).any():
            y = int(ys[np.flatnonzero(dxy == UNREACHABLE)[0]])
            # different components: no geodesic, so A cannot be convex-and-connected
            return ConvexityResult(False, (x, y, None))
        between = (D[x][None, :] + D[ys] == dxy[:, None]) & ~members[None, :]
        hit = np.flatnonzero(between.any(axis=1))
        if len(hit):
            y = int(ys[hit[0]])
            z = int(np.flatnonzero(between[hit[0]])[0])
            return ConvexityResult(False, (x, y, z))
    return ConvexityResult(True)


@dataclass(frozen=True)
class BoundaryBundle:
    inner: frozenset[int]
    outer: frozenset[int]
    in_edges: tuple[Edge, ...]
    out_edges: tuple[Edge, ...]

    @property
    def total(self) -> frozenset[int]:
        return self.inner | self.outer


def boundaries(g: Graph, A: Iterable[int]) -> BoundaryBundle:
    """Inner/outer vertex boundaries and oriented edge boundaries of ``A``.

    ``in_edges`` are the edges ``(b, a)`` with ``b`` outside and ``a`` inside,
    sorted; ``out_edges`` are their reversals.
    """
    A = frozenset(A)
    inner, outer, ins = set(), set(), []
    for a in A:
        for b in g.adjacency[a]:
            if b not in A:
                inner.add(a)
                outer.add(b)
                ins.append((b, a))
    ins.sort()
    outs = tuple(sorted((a, b) for b, a in ins))
    return BoundaryBundle(frozenset(inner), frozenset(outer), tuple(ins), outs)


def components(g: Graph, A: Iterable[int]) -> list[frozenset[int]]:
    """Connected pieces of the subgraph induced on ``A``, sorted by least id."""
    return _flood(g.adjacency, A)


def ball(g: Graph, A: Iterable[int], r: int) -> frozenset[int]:
    A = list(A)
    if not A:
        return frozenset()
    D = g.distances[A]
    return frozenset(np.flatnonzero(((D >= 0) & (D <= r)).any(axis=0)).tolist())


def set_diameter(g: Graph, S: Iterable[int]) -> float:
    """Largest pairwise distance within ``S``; ``inf`` if ``S`` spans components, 0 if empty."""
    S = list(S)
    if len(S) <= 1:
        return 0
    sub = g.distances[S][:, S]
    if (sub == UNREACHABLE).any():
        return float("inf")
    return int(sub.max())


def set_distance(g: Graph, A: Iterable[int], B: Iterable[int]) -> float:
    A, B = list(A), list(B)
    if not A or not B:
        return float("inf")
    sub = g.distances[np.ix_(A, B)]
    sub = sub[sub >= 0]
    return int(sub.min()) if sub.size else float("inf")


def threshold_graph(table: Sequence[Sequence[float]], R: float) -> Graph:
    """The distance-at-most-``R`` graph on the points of a metric table."""
    M = np.asarray(table, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GraphFormatError("metric table must be square")
    if not np.allclose(M, M.T):
        raise GraphFormatError("metric table is not symmetric")
    if np.any(np.diag(M) != 0):
        raise GraphFormatError("metric table must have a zero diagonal")
    if np.any(M < 0):
        raise GraphFormatError("metric table has negative entries")
    n = M.shape[0]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if M[i, j] <= R]
    return Graph.from_edges(n, edges)
