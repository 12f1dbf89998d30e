"""Cuts and cut families: radial cuts, boundary filters, connectification.

A cut is just a vertex set together with its boundary data.  Families keep a
provenance tag and whether they are closed under complement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import CapExceededError, ContractError, InvariantViolation
from .graph import BoundaryBundle, Graph, ball, boundaries, components, set_diameter, set_distance

PROVENANCES = ("radial", "diam", "card", "treedec", "custom", "connectify", "brute")


@dataclass(frozen=True)
class Cut:
    side: frozenset[int]
    boundary: BoundaryBundle
    diameter: float
    inner_count: int
    outer_count: int

    @property
    def vertex_boundary(self) -> frozenset[int]:
        return self.boundary.inner | self.boundary.outer

    @property
    def card(self) -> int:
        return min(self.inner_count, self.outer_count)


def make_cut(g: Graph, side: Iterable[int]) -> Cut:
    side = frozenset(side)
    bb = boundaries(g, side)
    return Cut(side, bb, set_diameter(g, bb.inner | bb.outer), len(bb.inner), len(bb.outer))


def _order(side: frozenset[int]):
    return (len(side), sorted(side))


@dataclass(frozen=True)
class CutFamily:
    graph: Graph
    cuts: tuple[Cut, ...]
    provenance: str = "custom"
    complement_closed: bool = False

    @classmethod
    def from_sides(cls, g: Graph, sides: Iterable[Iterable[int]], provenance: str = "custom",
                   close: bool = False) -> "CutFamily":
        """Deduplicate, optionally close under complement, and order by (size, members)."""
        uniq = {frozenset(s) for s in sides}
        for s in uniq:
            for v in s:
                g.check_vertex(v)
        if close:
            X = g.vertices
            uniq |= {X - s for s in uniq}
        ordered = sorted(uniq, key=_order)
        fam = cls(g, tuple(make_cut(g, s) for s in ordered), provenance, False)
        return fam.with_closure_flag()

    def with_closure_flag(self) -> "CutFamily":
        X = self.graph.vertices
        sides = self.sides()
        closed = all(X - s in sides for s in sides)
        return CutFamily(self.graph, self.cuts, self.provenance, closed)

    def sides(self) -> set[frozenset[int]]:
        return {c.side for c in self.cuts}

    def __len__(self) -> int:
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    def closed(self) -> "CutFamily":
        return CutFamily.from_sides(self.graph, self.sides(), self.provenance, close=True)

    def to_dict(self) -> dict:
        return {"provenance": self.provenance, "closed_under_complement": self.complement_closed,
                "cuts": [sorted(c.side) for c in self.cuts]}


def is_conn(g: Graph, side: Iterable[int]) -> bool:
    """Both the set and its complement are connected or empty."""
    side = frozenset(side)
    return len(components(g, side)) <= 1 and len(components(g, g.vertices - side)) <= 1


def _radial_sides(g: Graph, center: int, radius: int) -> list[frozenset[int]]:
    g.check_vertex(center)
    if radius < 0:
        raise ContractError("radius must be nonnegative")
    outside = g.component_of(center) - ball(g, [center], radius)
    return components(g, outside)


def radial_cuts(g: Graph, center: int, radius: int) -> list[Cut]:
    """Components of the complement of ``Ball_radius(center)`` within the center's component."""
    return [make_cut(g, c) for c in _radial_sides(g, center, radius)]


def all_radial_cuts(g: Graph, close: bool = False) -> CutFamily:
    sides: set[frozenset[int]] = set()
    for v in range(g.vertex_count):
        row = g.distances[v]
        ecc = int(row.max()) if g.vertex_count else 0
        for r in range(ecc + 1):
            sides.update(_radial_sides(g, v, r))  # dedupe before building boundaries
    return CutFamily.from_sides(g, sides, "radial", close)


def filter_diam(f: CutFamily, R: float, *, require_conn: bool = False) -> CutFamily:
    keep = [c for c in f.cuts if c.diameter <= R and (not require_conn or is_conn(f.graph, c.side))]
    return CutFamily(f.graph, tuple(keep), "diam", False).with_closure_flag()


def filter_card(f: CutFamily, N: int, *, require_conn: bool = False, one_sided: bool = False) -> CutFamily:
    """Keep cuts with ``min(|∂_iv|, |∂_ov|) <= N``, or ``|∂_ov| <= N`` when ``one_sided``."""
    def ok(c: Cut) -> bool:
        size = c.outer_count if one_sided else c.card
        return size <= N and (not require_conn or is_conn(f.graph, c.side))

    keep = [c for c in f.cuts if ok(c)]
    return CutFamily(f.graph, tuple(keep), "card", False).with_closure_flag()


def connectify(g: Graph, f: CutFamily, *, close: bool = False) -> CutFamily:
    """Flip-flip construction: ``¬D`` for ``H`` in ``f``, ``C`` a component of ``H``, ``D`` a component of ``¬C``.

    The graph must be connected.  Trivial members pass through.  Each output has both sides connected or
    empty and its inward edge boundary inside its source's (both asserted).
    """
    X = g.vertices
    sides = f.sides()
    if not all(X - s in sides for s in sides):
        raise ContractError("connectify needs a complement-closed family")
    if g.vertex_count and not is_conn(g, X):
        # ¬D would swallow the other components, so no output could be connected
        raise ContractError("connectify needs a connected graph; run it per component")
    out: set[frozenset[int]] = set()
    for H in sorted(sides, key=_order):
        if not H or H == X:
            out.add(H)
            continue
        source_edges = set(boundaries(g, H).in_edges)
        for C in components(g, H):
            for D in components(g, X - C):
                new = X - D
                if not is_conn(g, new):
                    raise InvariantViolation(f"connectify produced a disconnected cut {sorted(new)}")
                if not set(boundaries(g, new).in_edges) <= source_edges:
                    raise InvariantViolation("connectify output boundary escapes its source")
                out.add(new)
    return CutFamily.from_sides(g, out, "connectify", close)


@dataclass(frozen=True)
class FinitenessReport:
    counts: tuple[int, ...]
    maximum: int


def walling_finiteness_check(g: Graph, f: CutFamily) -> FinitenessReport:
    """Per vertex, how many members have it on their vertex boundary."""
    counts = [0] * g.vertex_count
    for c in f.cuts:
        for v in c.vertex_boundary:
            counts[v] += 1
    return FinitenessReport(tuple(counts), max(counts, default=0))


@dataclass(frozen=True)
class SuccessorDistanceReport:
    pairs: tuple[tuple[int, int], ...]
    vertex_boundary_distances: tuple[float, ...]
    inner_boundary_distances: tuple[float, ...]

    @property
    def max_vertex_boundary_distance(self) -> float | None:
        return max(self.vertex_boundary_distances, default=None)

    @property
    def max_inner_boundary_distance(self) -> float | None:
        return max(self.inner_boundary_distances, default=None)

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs],
                "vertex_boundary_distances": list(self.vertex_boundary_distances),
                "inner_boundary_distances": list(self.inner_boundary_distances),
                "max_vertex_boundary_distance": self.max_vertex_boundary_distance,
                "max_inner_boundary_distance": self.max_inner_boundary_distance}


def successor_distance_report(g: Graph, f: CutFamily) -> SuccessorDistanceReport:
    """Boundary distances over successor pairs of the family's inclusion order.

    ``(i, j)`` indexes ``f.cuts``: cut ``j`` strictly contains cut ``i`` with no
    member strictly between.  Two distances are recorded per pair: between the
    full vertex boundaries and between the inner vertex boundaries.
    """
    X = g.vertices
    cuts = [c for c in f.cuts]
    idx = [i for i, c in enumerate(cuts) if c.side and c.side != X]
    pairs, dv, di = [], [], []
    for i in idx:
        h = cuts[i].side
        supers = [j for j in idx if h < cuts[j].side]
        for j in supers:
            k = cuts[j].side
            if any(h < cuts[m].side < k for m in supers):
                continue
            pairs.append((i, j))
            dv.append(set_distance(g, cuts[i].vertex_boundary, cuts[j].vertex_boundary))
            di.append(set_distance(g, cuts[i].boundary.inner, cuts[j].boundary.inner))
    return SuccessorDistanceReport(tuple(pairs), tuple(dv), tuple(di))


def brute_force_cuts(g: Graph, max_vertices: int = 20) -> CutFamily:
    """Every vertex set whose two sides are connected or empty (exhaustive)."""
    n = g.vertex_count
    if n > max_vertices:
        raise CapExceededError(f"brute_force_cuts limited to {max_vertices} vertices, got {n}")
    nbr = [sum(1 << w for w in g.adjacency[v]) for v in range(n)]
    full = (1 << n) - 1

    def connected(mask: int) -> bool:
        if not mask:
            return True
        start = mask & -mask
        seen, frontier = start, start
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            grow = nbr[low.bit_length() - 1] & mask & ~seen
            seen |= grow
            frontier |= grow
        return seen == mask

    conn = [connected(m) for m in range(full + 1)]
    sides = [frozenset(v for v in range(n) if m >> v & 1)
             for m in range(full + 1) if conn[m] and conn[full ^ m]]
    return CutFamily.from_sides(g, sides, "brute")
