"""Canonical spanning trees of median graphs, plus one-ended hyperfiniteness witnesses.

The spanning tree is built in stages indexed by hyperplane colors: stage ``n``
has one component per block of vertices not separated by any hyperplane of
color ``>= n``.  Going from stage ``n`` to ``n+1`` adds, inside every
``n+1``-block, the least edge between each pair of adjacent ``n``-blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ._unionfind import UnionFind
from .errors import ContractError, InvariantViolation
from .graph import Edge, Graph, set_diameter
from .hyperplanes import HalfSpace, halfspace_system, hyperplane_adjacency
from .median import MedianGraph, gate_projection, require_median

Partition = tuple[frozenset[int], ...]


# -- coloring -------------------------------------------------------------

@dataclass(frozen=True)
class HalfspaceColoring:
    colors: tuple[int, ...]          # per unoriented hyperplane id
    color_count: int
    mode: str = "greedy"
    degree_bound: int | None = None
    diameter_bound: int | None = None

    def color_of(self, h: HalfSpace) -> int:
        return self.colors[h.hyperplane]

    def bound(self) -> int | None:
        """``3^(D^(2R+1))`` in bounded mode, or ``None`` when too large to write down."""
        if self.degree_bound is None:
            return None
        exp = color_bound_exponent(self.degree_bound, self.diameter_bound)
        return 3 ** exp if exp < 64 else None

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "color_count": self.color_count, "colors": list(self.colors)}
        if self.degree_bound is not None:
            out.update(D=self.degree_bound, R=self.diameter_bound,
                       bound_exponent=str(color_bound_exponent(self.degree_bound, self.diameter_bound)))
        return out


def color_bound_exponent(D: int, R: int) -> int:
    return D ** (2 * R + 1)


def within_color_bound(count: int, D: int, R: int) -> bool:
    """``count <= 3^(D^(2R+1))`` without building the power when the exponent is large."""
    exp = color_bound_exponent(D, R)
    if exp >= 64:
        return True  # 3^64 exceeds any count we can hold in memory
    return count <= 3 ** exp


def hyperplane_diameters(g: MedianGraph) -> list[float]:
    """``diam(∂_v H)`` per unoriented hyperplane."""
    system = halfspace_system(g)
    return [set_diameter(g, system.halfspaces[a].vertex_boundary) for a, _ in system.hyperplane_sides]


def max_hyperplane_diameter(g: MedianGraph) -> int:
    return int(max(hyperplane_diameters(g), default=0))


def color_halfspaces(g: MedianGraph, mode: str = "greedy", D: int | None = None,
                     R: int | None = None) -> HalfspaceColoring:
    """Greedy proper coloring of hyperplanes whose vertex boundaries meet, in ascending id.

    ``mode="bounded"`` checks the premises ``max degree <= D`` and hyperplane
    diameters ``<= R`` and asserts the color count stays within ``3^(D^(2R+1))``.
    """
    require_median(g)
    adj = hyperplane_adjacency(g).graph
    k = adj.vertex_count
    colors = [-1] * k
    for i in range(k):
        used = {colors[j] for j in adj.adjacency[i] if colors[j] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[i] = c
    count = max(colors, default=-1) + 1
    if mode == "greedy":
        return HalfspaceColoring(tuple(colors), count)
    if mode != "bounded":
        raise ContractError(f"unknown coloring mode {mode!r}")
    if D is None or R is None:
        raise ContractError("bounded mode needs D and R")
    if g.max_degree > D:
        raise ContractError(f"degree premise violated: max degree {g.max_degree} > D = {D}")
    actual_r = max_hyperplane_diameter(g)
    if actual_r > R:
        raise ContractError(f"diameter premise violated: hyperplane diameter {actual_r} > R = {R}")
    if not within_color_bound(count, D, R):
        raise InvariantViolation(f"{count} colors exceed 3^({D}^{2 * R + 1})")
    return HalfspaceColoring(tuple(colors), count, "bounded", D, R)


def validate_coloring(g: MedianGraph, coloring: HalfspaceColoring) -> None:
    adj = hyperplane_adjacency(g).graph
    if len(coloring.colors) != adj.vertex_count:
        raise ContractError("coloring does not match the hyperplane count")
    for i, j in adj.edges():
        if coloring.colors[i] == coloring.colors[j]:
            raise ContractError(f"hyperplanes {i} and {j} meet but share color {coloring.colors[i]}")


# -- staged extraction ----------------------------------------------------

@dataclass(frozen=True)
class StagedForest:
    graph: Graph
    coloring: HalfspaceColoring
    stages: tuple[frozenset[Edge], ...]     # T_0 ⊆ T_1 ⊆ ... ⊆ T_k
    blocks: tuple[Partition, ...]           # K_n-blocks for n = 0..k

    @property
    def tree(self) -> frozenset[Edge]:
        return self.stages[-1]

    def tree_graph(self, stage: int | None = None) -> Graph:
        edges = self.stages[-1 if stage is None else stage]
        return Graph.from_edges(self.graph.vertex_count, sorted(edges))

    def to_dict(self) -> dict:
        return {"coloring": self.coloring.to_dict(),
                "stages": [sorted(list(e) for e in s) for s in self.stages],
                "blocks": [[sorted(b) for b in part] for part in self.blocks],
                "tree": sorted(list(e) for e in self.tree)}


def _edge_colors(g: MedianGraph, coloring: HalfspaceColoring) -> dict[Edge, int]:
    system = halfspace_system(g)
    out = {}
    for hp, edges in enumerate(system.hyperplane_edges):
        for e in edges:
            out[e] = coloring.colors[hp]
    return out


def k_blocks(g: Graph, edge_color: dict[Edge, int], n: int) -> Partition:
    """Vertices joined by edges of color ``< n``; equivalently not separated by colors ``>= n``."""
    uf = UnionFind(range(g.vertex_count))
    for e, c in edge_color.items():
        if c < n:
            uf.union(*e)
    return tuple(frozenset(b) for b in uf.groups())


def _forest_components(n: int, edges: Iterable[Edge]) -> Partition:
    uf = UnionFind(range(n))
    for u, v in edges:
        if not uf.union(u, v):
            raise InvariantViolation(f"edge ({u}, {v}) closes a cycle")
    return tuple(frozenset(b) for b in uf.groups())


def extract_spanning_tree(g: MedianGraph, coloring: HalfspaceColoring | None = None) -> StagedForest:
    """Run the staged construction; each stage's components are checked against the blocks."""
    require_median(g)
    if g.vertex_count and not g.is_connected():
        raise ContractError("extract_spanning_tree expects a connected graph; run it per component")
    if coloring is None:
        coloring = color_halfspaces(g)
    validate_coloring(g, coloring)
    edge_color = _edge_colors(g, coloring)
    k = coloring.color_count
    n_vert = g.vertex_count
    blocks = [k_blocks(g, edge_color, 0)]
    stages = [frozenset()]
    for n in range(k):
        cur = blocks[-1]
        where = {}
        for i, b in enumerate(cur):
            for v in b:
                where[v] = i
        chosen: dict[tuple[int, int], Edge] = {}
        for e in sorted(edge_color):
            if edge_color[e] != n:
                continue
            a, b = where[e[0]], where[e[1]]
            key = (min(a, b), max(a, b))
            if key not in chosen:
                chosen[key] = e
        new_edges = stages[-1] | frozenset(chosen.values())
        nxt = k_blocks(g, edge_color, n + 1)
        if _forest_components(n_vert, new_edges) != nxt:
            raise InvariantViolation(f"stage {n + 1} components differ from the color blocks")
        stages.append(new_edges)
        blocks.append(nxt)
    if n_vert and len(blocks[-1]) != 1:
        raise InvariantViolation("final stage does not span")
    return StagedForest(g, coloring, tuple(stages), tuple(blocks))


def lipschitz_constants(R: int, count: int) -> list[int]:
    """``M_0 .. M_count`` with ``M_0 = 0`` and ``M_{n+1} = 2R M_n + 1``."""
    out = [0]
    for _ in range(count):
        out.append(2 * R * out[-1] + 1)
    return out


@dataclass(frozen=True)
class QuasiIsometryReport:
    R: int
    bounds: tuple[int, ...]              # M_n
    observed: tuple[int, ...]            # max d_{T_n}(x, y) over adjacent same-block pairs
    max_ratio: float
    holds: bool

    def to_dict(self) -> dict:
        return dict(R=self.R, bounds=list(self.bounds), observed=list(self.observed),
                    max_ratio=self.max_ratio, holds=self.holds)


def verify_quasi_isometry(g: MedianGraph, sf: StagedForest, R: int | None = None,
                          *, strict: bool = True) -> QuasiIsometryReport:
    """Check ``d_{T_n}(x, y) <= M_n`` for every edge inside a single ``n``-block, at every stage."""
    actual = max_hyperplane_diameter(g)
    if R is None:
        R = actual
    elif actual > R:
        raise ContractError(f"premise violated: hyperplane diameter {actual} > R = {R}")
    k = len(sf.stages) - 1
    bounds = lipschitz_constants(R, k)
    observed, ratio, holds = [], 0.0, True
    n = g.vertex_count
    for stage in range(k + 1):
        edges = sorted(sf.stages[stage])
        if edges:
            rows = [u for u, v in edges] + [v for u, v in edges]
            cols = [v for u, v in edges] + [u for u, v in edges]
            D = shortest_path(csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)),
                              unweighted=True, directed=False)
        else:
            D = None
        worst = 0
        where = {v: i for i, b in enumerate(sf.blocks[stage]) for v in b}
        for u, v in g.edges():
            if where[u] != where[v]:
                continue
            d = int(D[u, v]) if D is not None and np.isfinite(D[u, v]) else -1
            if d < 0:
                raise InvariantViolation(f"stage {stage} forest disconnects block edge ({u}, {v})")
            worst = max(worst, d)
            if d > bounds[stage]:
                holds = False
            if bounds[stage]:
                ratio = max(ratio, d / bounds[stage])
        observed.append(worst)
    if strict and not holds:
        raise InvariantViolation("Lipschitz bound M_n violated")
    return QuasiIsometryReport(R, tuple(bounds), tuple(observed), ratio, holds)


# -- one-ended wallings ---------------------------------------------------

@dataclass(frozen=True)
class FerSequence:
    ground: tuple[str, ...]
    partitions: tuple[Partition, ...]

    def relation(self, n: int) -> set[tuple[int, int]]:
        out = set()
        for block in self.partitions[n]:
            for x in block:
                for y in block:
                    out.add((x, y))
        return out

    def is_increasing(self) -> bool:
        for a, b in zip(self.partitions, self.partitions[1:]):
            where = {v: i for i, blk in enumerate(b) for v in blk}
            if any(len({where[v] for v in blk}) != 1 for blk in a):
                return False
        return True

    def is_full_at_end(self) -> bool:
        return not self.partitions or len(self.partitions[-1]) <= 1

    def to_dict(self) -> dict:
        return {"ground": list(self.ground),
                "partitions": [[[self.ground[v] for v in sorted(b)] for b in p] for p in self.partitions]}


def _partition_by(n: int, family: Sequence[frozenset[int]]) -> Partition:
    groups: dict[tuple, list[int]] = {}
    for x in range(n):
        groups.setdefault(tuple(x in s for s in family), []).append(x)
    return tuple(sorted((frozenset(v) for v in groups.values()), key=min))


def _normalize(ground: Sequence, family: Iterable[Iterable]) -> tuple[tuple[str, ...], list[frozenset[int]]]:
    ground = tuple(str(x) for x in ground)
    pos = {s: i for i, s in enumerate(ground)}
    fam = []
    for I in family:
        ids = frozenset(pos[str(x)] for x in I)
        if not ids:
            raise ContractError("family members must be nonempty")
        if ids not in fam:
            fam.append(ids)
    return ground, fam


def oneended_fer_witness(ground: Sequence, family: Iterable[Iterable]) -> FerSequence:
    """``x F_n y`` iff every member of size ``> n`` contains both or neither; ``n = 0 .. max |I|``."""
    ground, fam = _normalize(ground, family)
    top = max((len(I) for I in fam), default=0)
    parts = tuple(_partition_by(len(ground), [I for I in fam if len(I) > n]) for n in range(top + 1))
    return FerSequence(ground, parts)


def oneended_fer_witness_rank(ground: Sequence, family: Iterable[Iterable]) -> FerSequence:
    """Rank variant: ``I_0`` is the family, ``I_{n+1}`` drops the minimal members of ``I_n``."""
    ground, fam = _normalize(ground, family)
    level = list(fam)
    parts = [_partition_by(len(ground), level)]
    while level:
        minimal = [I for I in level if not any(J < I for J in level)]
        level = [I for I in level if I not in minimal]
        parts.append(_partition_by(len(ground), level))
    return FerSequence(ground, tuple(parts))


@dataclass(frozen=True)
class OneEndedAxiomReport:
    max_separating: int          # (ii): members containing x but not y, worst pair
    max_splitting: int           # (ii'): members J meeting I and I ∖ J, worst I
    max_non_nested: int          # (ii''): members non-nested with I, worst I
    non_nested_within_splitting: bool
    uncovered_points: tuple[str, ...]
    contains_ground: bool

    @property
    def cofinal(self) -> bool:
        return self.contains_ground

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["uncovered_points"] = list(self.uncovered_points)
        d["cofinal"] = self.cofinal
        return d


def oneended_axiom_check(ground: Sequence, family: Iterable[Iterable]) -> OneEndedAxiomReport:
    """Counts behind the finiteness clauses and the cofinality witness, on finite data.

    On a finite ground set cofinality among finite subsets means the ground set
    itself is a member.
    """
    ground, fam = _normalize(ground, family)
    X = frozenset(range(len(ground)))
    max_sep = 0
    for x in X:
        for y in X:
            if x != y:
                max_sep = max(max_sep, sum(1 for J in fam if x in J and y not in J))

    def non_nested(a, b):
        return bool(a & b) and bool(a - b) and bool(b - a) and bool(X - a - b)

    max_split = max_nn = 0
    inclusion = True
    for I in fam:
        split = {J for J in fam if J != I and I & J and I - J}
        nn = {J for J in fam if J != I and non_nested(I, J)}
        inclusion &= nn <= split
        max_split = max(max_split, len(split))
        max_nn = max(max_nn, len(nn))
    covered = frozenset().union(*fam) if fam else frozenset()
    return OneEndedAxiomReport(max_sep, max_split, max_nn, inclusion,
                               tuple(ground[x] for x in sorted(X - covered)), X in fam)


# -- leaf pruning ---------------------------------------------------------

@dataclass(frozen=True)
class LeafPruneResult:
    stages: tuple[frozenset[int], ...]   # vertices deleted at each stage
    links: tuple[tuple[int, int], ...]   # (deleted vertex, its projection onto the survivors)
    fer: FerSequence
    remaining: frozenset[int]

    def forest(self) -> Graph:
        n = len(self.fer.ground)
        return Graph.from_edges(n, [tuple(sorted(e)) for e in self.links])

    def to_dict(self) -> dict:
        return {"stages": [sorted(s) for s in self.stages], "links": [list(e) for e in self.links],
                "remaining": sorted(self.remaining), "fer": self.fer.to_dict()}


def leaf_prune(g: MedianGraph, U) -> LeafPruneResult:
    """Peel minimal half-spaces not containing ``U``, linking each peeled vertex to its gate on the rest.

    ``U`` is a vertex (principal orientation) or any object with a
    ``contains(h: HalfSpace) -> bool`` method deciding ``U ∈ h``.
    """
    system = halfspace_system(require_median(g))
    if isinstance(U, (int, np.integer)):
        u = int(U)
        g.check_vertex(u)
        contains: Callable[[HalfSpace], bool] = lambda h: u in h.side  # noqa: E731
    else:
        contains = U.contains
    level = [h for h in system.halfspaces if not contains(h)]
    alive = set(range(g.vertex_count))
    uf = UnionFind(range(g.vertex_count))
    parts = [tuple(frozenset(b) for b in uf.groups())]
    stages, links = [], []
    while level:
        minimal = [h for h in level if not any(k.side < h.side for k in level)]
        level = [h for h in level if h not in minimal]
        doomed = set().union(*(h.side for h in minimal)) & alive
        survivors = alive - doomed
        if not survivors:
            raise InvariantViolation("leaf pruning deleted every vertex")
        for v in sorted(doomed):
            p = gate_projection(g, survivors, v)
            links.append((v, p))
            uf.union(v, p)
        alive = survivors
        stages.append(frozenset(doomed))
        parts.append(tuple(frozenset(b) for b in uf.groups()))
    fer = FerSequence(g.labels, tuple(parts))
    return LeafPruneResult(tuple(stages), tuple(links), fer, frozenset(alive))
