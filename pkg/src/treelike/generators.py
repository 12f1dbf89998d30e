"""Corpus generators for median graphs and small test graphs.

Every median generator asserts :func:`check_median` on its output.  Generator
specs are strings such as ``"grid(3,3)"`` or ``"product(hypercube(2),random_tree(5,1))"``.
"""

from __future__ import annotations

import random
import re
from itertools import combinations

import numpy as np

from .errors import CapExceededError, GraphFormatError, NotMedianError
from .graph import Graph
from .median import check_median

DEFAULT_CAP = 4096


def _assert_median(g: Graph, what: str) -> Graph:
    cert = check_median(g)
    if not cert:
        raise NotMedianError(f"generator {what} produced a non-median graph", cert)
    return g


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphFormatError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(k: int) -> Graph:
    """K_{1,k} with hub 0."""
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, list(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(n: int) -> Graph:
    """Q_n on bit vectors; vertex id is the integer whose bits are the coordinates."""
    labels = [format(v, f"0{n}b")[::-1] if n else "" for v in range(1 << n)]
    edges = [(v, v ^ (1 << i)) for v in range(1 << n) for i in range(n) if not v >> i & 1]
    g = Graph.from_edges(1 << n, edges, labels if n else None)
    return _assert_median(g, f"hypercube({n})")


def grid(a: int, b: int) -> Graph:
    """``a`` by ``b`` grid; vertex ``(i, j)`` has id ``i*b + j`` and label ``"i,j"``."""
    if a < 1 or b < 1:
        raise GraphFormatError("grid sides must be positive")
    edges = [(i * b + j, i * b + j + 1) for i in range(a) for j in range(b - 1)]
    edges += [(i * b + j, (i + 1) * b + j) for i in range(a - 1) for j in range(b)]
    labels = [f"{i},{j}" for i in range(a) for j in range(b)]
    return _assert_median(Graph.from_edges(a * b, edges, labels), f"grid({a},{b})")


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random attachment tree: vertex ``i`` joins a random earlier vertex."""
    if n < 1:
        raise GraphFormatError("a tree needs at least one vertex")
    rng = random.Random(seed)
    return Graph.from_edges(n, [(rng.randrange(i), i) for i in range(1, n)])


def random_graph(n: int, p: float, seed: int, *, connected: bool = True) -> Graph:
    """Erdős–Rényi graph, made connected by a random spanning tree when asked."""
    rng = random.Random(seed)
    edges = {(i, j) for i, j in combinations(range(n), 2) if rng.random() < p}
    if connected:
        for i in range(1, n):
            j = rng.randrange(i)
            edges.add((j, i))
    return Graph.from_edges(n, sorted(edges))


def product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex ``(u, v)`` has id ``u*|h| + v``."""
    m = h.vertex_count
    edges = [(u * m + v, w * m + v) for u, w in g.edges() for v in range(m)]
    edges += [(u * m + v, u * m + w) for u in range(g.vertex_count) for v, w in h.edges()]
    labels = [f"({a},{b})" for a in g.labels for b in h.labels]
    return Graph.from_edges(g.vertex_count * m, edges, labels)


def _majority_close(points: set[int]) -> set[int]:
    pts = set(points)
    new = list(pts)
    while new:
        arr = np.fromiter(sorted(pts), dtype=np.int64)
        found: set[int] = set()
        for a in new:
            ab_and = a & arr
            ab_or = a | arr
            maj = ab_and[:, None] | (ab_or[:, None] & arr[None, :])
            found.update(np.unique(maj).tolist())
        new = sorted(found - pts)
        pts.update(new)
    return pts


def _cube_components(points: set[int], n_dim: int) -> list[set[int]]:
    left = set(points)
    comps = []
    while left:
        s = min(left)
        comp, stack = {s}, [s]
        left.discard(s)
        while stack:
            v = stack.pop()
            for i in range(n_dim):
                w = v ^ (1 << i)
                if w in left:
                    left.discard(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def median_closure(n_dim: int, n_seeds: int, seed: int, *, cap: int = DEFAULT_CAP) -> Graph:
    """Induced subgraph of Q_n on the majority closure of random seed points.

    Majority-closed sets may be disconnected; the least component is joined to
    its nearest other component by a monotone cube path (lowest coordinates
    first) and the result is closed again, until connected.
    """
    if n_dim < 0 or n_seeds < 1:
        raise GraphFormatError("median_closure needs n_dim >= 0 and n_seeds >= 1")
    rng = random.Random(seed)
    pts = {rng.randrange(1 << n_dim) for _ in range(n_seeds)}
    while True:
        pts = _majority_close(pts)
        if len(pts) > cap:
            raise CapExceededError(f"median_closure grew past {cap} vertices")
        comps = _cube_components(pts, n_dim)
        if len(comps) == 1:
            break
        first = comps[0]
        rest = set().union(*comps[1:])
        a, b = min(((a, b) for a in first for b in rest),
                   key=lambda ab: (bin(ab[0] ^ ab[1]).count("1"), ab))
        v = a
        for i in range(n_dim):
            if (v ^ b) >> i & 1:
                v ^= 1 << i
                pts.add(v)
    order = sorted(pts)
    index = {v: i for i, v in enumerate(order)}
    edges = [(index[v], index[v ^ (1 << i)]) for v in order for i in range(n_dim)
             if not v >> i & 1 and v ^ (1 << i) in index]
    labels = [format(v, f"0{n_dim}b")[::-1] if n_dim else "" for v in order]
    g = Graph.from_edges(len(order), edges, labels if n_dim else None)
    return _assert_median(g, f"median_closure({n_dim},{n_seeds},{seed})")


def staircase_vertices(r: int) -> list[tuple[int, int]]:
    """Vertices ``(a, b)`` of the staircase strip with ``a, b <= r``."""
    return [(a, b) for a in range(r + 1) for b in range(r + 1) if -2 <= b - a <= 3]


def staircase(r: int) -> Graph:
    """Finite window of the diagonal staircase strip ``{(a,b) in N^2 : -2 <= b-a <= 3}``."""
    if r < 1:
        raise GraphFormatError("staircase radius must be at least 1")
    verts = staircase_vertices(r)
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for (a, b), i in index.items():
        for w in ((a + 1, b), (a, b + 1)):
            if w in index:
                edges.append((i, index[w]))
    labels = [f"{a},{b}" for a, b in verts]
    return _assert_median(Graph.from_edges(len(verts), edges, labels), f"staircase({r})")


_KINDS = {
    "hypercube": (hypercube, 1),
    "grid": (grid, 2),
    "random_tree": (random_tree, 2),
    "median_closure": (median_closure, 3),
    "staircase": (staircase, 1),
    "path": (path, 1),
    "star": (star, 1),
}


def _split_args(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


_SEEDED = ("random_tree", "median_closure")


def generate(spec: str, *, cap: int = DEFAULT_CAP, seed: int | None = None) -> Graph:
    """Build a graph from a spec string like ``"product(grid(2,3),hypercube(2))"``.

    Seeded kinds may leave out their trailing seed when ``seed`` is given.
    """
    m = re.fullmatch(r"\s*([a-z_]+)\s*\((.*)\)\s*", spec)
    if not m:
        raise GraphFormatError(f"cannot parse generator spec {spec!r}")
    kind, body = m.group(1), m.group(2)
    args = _split_args(body)
    if kind == "product":
        if len(args) != 2:
            raise GraphFormatError("product takes two specs")
        g = product(generate(args[0], cap=cap, seed=seed), generate(args[1], cap=cap, seed=seed))
        g = _assert_median(g, spec)
    else:
        if kind not in _KINDS:
            raise GraphFormatError(f"unknown generator {kind!r}")
        fn, arity = _KINDS[kind]
        if kind in _SEEDED and seed is not None and len(args) == arity - 1:
            args.append(str(seed))
        if len(args) != arity:
            raise GraphFormatError(f"{kind} takes {arity} integer arguments")
        try:
            ints = [int(a) for a in args]
        except ValueError as exc:
            raise GraphFormatError(f"non-integer argument in {spec!r}") from exc
        g = fn(*ints, cap=cap) if kind == "median_closure" else fn(*ints)
        if kind in ("random_tree", "path", "star"):
            g = _assert_median(g, spec)
    if g.vertex_count > cap:
        raise CapExceededError(f"{spec} has {g.vertex_count} vertices, cap is {cap}")
    return g
