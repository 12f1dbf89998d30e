"""Flows toward an end (or a vertex) of a median graph.

A target ``U`` is an orientation of the half-spaces: for each half-space it
says whether the target lies inside.  From ``x`` the flow jumps to the corner
opposite ``x`` of the cube cut by the maximal half-spaces that hold ``U`` but
not ``x``.  Finite graphs use principal targets; the built-in infinite
families are handled through finite windows where only vertices far enough
from the cut-off edge are certified.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from ._unionfind import UnionFind
from .errors import CertificationError, ContractError, InvariantViolation
from .generators import grid, staircase
from .graph import Graph
from .hyperplanes import HalfSpace, HalfspaceSystem, halfspace_system
from .median import MedianGraph, as_median, gate_projection, require_median

FAMILIES = ("quadrant-staircase", "regular-tree", "ladder", "grid-quadrant")
_ALIASES = {"quadrant": "quadrant-staircase", "staircase": "quadrant-staircase"}


@dataclass(frozen=True)
class EndTarget:
    """Where the flow goes.

    ``kind`` is ``"principal"`` (a vertex of a finite graph) or ``"windowed"``.
    For windows ``toward(x, y)`` says whether the end lies beyond the edge from
    ``x`` to ``y``, and ``certified`` lists the vertices whose flow data is exact.
    """

    kind: str
    vertex: int | None = None
    descriptor: str | None = None
    toward: Callable[[int, int], bool] | None = field(default=None, repr=False, compare=False)
    certified: frozenset[int] | None = field(default=None, repr=False)

    @classmethod
    def principal(cls, u: int) -> "EndTarget":
        return cls("principal", vertex=int(u), descriptor=f"vertex:{int(u)}")

    @classmethod
    def windowed(cls, descriptor: str, toward: Callable[[int, int], bool],
                 certified: Iterable[int]) -> "EndTarget":
        return cls("windowed", descriptor=descriptor, toward=toward, certified=frozenset(certified))

    def contains(self, h: HalfSpace) -> bool:
        """Whether the target lies in ``h``."""
        if self.kind == "principal":
            return self.vertex in h.side
        if h.trivial:
            return bool(h.side)
        b, a = h.in_edges[0]
        return bool(self.toward(b, a))

    def is_certified(self, x: int) -> bool:
        return self.certified is None or x in self.certified

    def require_certified(self, x: int) -> None:
        if not self.is_certified(x):
            raise CertificationError(f"vertex {x} is outside the certified region of {self.descriptor}")


def _system(g: Graph) -> HalfspaceSystem:
    return halfspace_system(require_median(g))


def _edge_halfspaces(system: HalfspaceSystem) -> dict[tuple[int, int], HalfSpace]:
    """Oriented edge ``(x, y)`` to the half-space ``cone_x y`` it enters."""
    cached = system.graph._cache.get("edge_halfspaces")
    if cached is None:
        cached = {e: h for h in system.halfspaces for e in h.in_edges}
        system.graph._cache["edge_halfspaces"] = cached
    return cached


def target_vector(g: Graph, U: EndTarget) -> np.ndarray:
    """Boolean vector over nontrivial half-spaces: ``U`` lies inside."""
    system = _system(g)
    return np.array([U.contains(h) for h in system.halfspaces], dtype=bool)


def check_orientation(g: Graph, U: EndTarget) -> None:
    """Exactly one side of each hyperplane holds ``U``, and membership is upward closed."""
    system = _system(g)
    vec = target_vector(g, U)
    for h in system.halfspaces:
        if vec[h.id] == vec[h.complement]:
            raise ContractError(f"target picks {'both' if vec[h.id] else 'neither'} side of hyperplane "
                                f"{h.hyperplane}")
    M = system.membership
    inter = M.astype(np.float32) @ (~M).T.astype(np.float32)
    subset = inter == 0
    bad = np.argwhere(subset & vec[:, None] & ~vec[None, :])
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise ContractError(f"target orientation is not upward closed: {i} holds it, superset {j} does not")


def _assert_non_nested(system: HalfspaceSystem, A: list[HalfSpace]) -> None:
    nest = system.nested_matrix()
    for h, k in combinations(A, 2):
        if nest[h.id, k.id]:
            raise InvariantViolation(f"half-spaces {h.id} and {k.id} of a step set are nested")


def a_set(g: Graph, U: EndTarget, x: int) -> list[HalfSpace]:
    """Maximal half-spaces holding ``U`` but not ``x``, sorted by id.

    These are the cones ``cone_x y`` over neighbours ``y`` that hold ``U``.
    """
    g.check_vertex(x)
    U.require_certified(x)
    system = _system(g)
    by_edge = _edge_halfspaces(system)
    out = sorted((by_edge[(x, y)] for y in g.adjacency[x] if U.contains(by_edge[(x, y)])), key=lambda h: h.id)
    _assert_non_nested(system, out)
    return out


def a_set_scan(g: Graph, U: EndTarget, x: int) -> list[HalfSpace]:
    """Reference version: scan every half-space and keep the inclusion-maximal ones."""
    system = _system(g)
    cand = [h for h in system.halfspaces if U.contains(h) and x not in h.side]
    return [h for h in cand if not any(h.side < k.side for k in cand)]


def t_u_step(g: Graph, U: EndTarget, x: int) -> int:
    """Gate of ``x`` in the intersection of its step set, or ``x`` itself when that set is empty."""
    A = a_set(g, U, x)
    if not A:
        return x
    inter = frozenset.intersection(*(h.side for h in A))
    t = gate_projection(g, inter, x)
    if int(g.distances[x, t]) != len(A):
        raise InvariantViolation(f"step from {x} has length {g.distances[x, t]}, expected {len(A)}")
    return t


def t_u_step_single(g: Graph, U: EndTarget, x: int) -> int:
    """Variant step: cross only the least-id half-space of the step set."""
    A = a_set(g, U, x)
    if not A:
        return x
    h = A[0]
    return next(a for b, a in h.in_edges if b == x)


@dataclass(frozen=True)
class FlowForest:
    """The step map and its orbits; ``-1`` marks vertices without a certified step."""

    graph: Graph
    target: EndTarget
    step: tuple[int, ...]
    orbits: tuple[frozenset[int], ...]
    orbit_of: tuple[int, ...]
    roots: tuple[int | None, ...]
    certified: tuple[bool, ...]
    variant: str = "canonical"

    def forward_orbit(self, x: int) -> list[int]:
        """``x, T x, T² x, ...`` up to a fixed point or the first vertex without a step."""
        out = [x]
        seen = {x}
        while True:
            t = self.step[out[-1]]
            if t < 0 or t in seen:
                return out
            out.append(t)
            seen.add(t)

    def to_dict(self) -> dict:
        g = self.graph
        lab = g.label
        return {"target": self.target.descriptor, "variant": self.variant,
                "step": {lab(x): (lab(t) if t >= 0 else None) for x, t in enumerate(self.step)},
                "orbits": [sorted(lab(v) for v in o) for o in self.orbits],
                "roots": [lab(r) if r is not None else None for r in self.roots],
                "certified": {lab(x): c for x, c in enumerate(self.certified)}}


def _outside_target(system: HalfspaceSystem, vec: np.ndarray, x: int) -> np.ndarray:
    return vec & ~system.membership[:, x]


def flow_forest(g: Graph, U: EndTarget, *, variant: str = "canonical") -> FlowForest:
    """Step map over all certified vertices, orbits as components of its graph.

    Each non-fixed step is checked to remove exactly the step set from the
    half-spaces separating the vertex from ``U``.
    """
    if variant not in ("canonical", "single"):
        raise ContractError(f"unknown flow variant {variant!r}")
    system = _system(g)
    vec = target_vector(g, U)
    stepper = t_u_step if variant == "canonical" else t_u_step_single
    n = g.vertex_count
    certified = tuple(U.is_certified(x) for x in range(n))
    step = [-1] * n
    for x in range(n):
        if not certified[x]:
            continue
        t = stepper(g, U, x)
        step[x] = t
        before = _outside_target(system, vec, x)
        after = _outside_target(system, vec, t)
        if t == x:
            continue
        if (after & ~before).any() or not (before & ~after).any():
            raise InvariantViolation(f"step {x} -> {t} is not strictly monotone toward the target")
        if variant == "canonical":
            removed = {int(i) for i in np.flatnonzero(before & ~after)}
            if removed != {h.id for h in a_set(g, U, x)}:
                raise InvariantViolation(f"step {x} -> {t} removed the wrong half-spaces")
    uf = UnionFind(range(n))
    for x, t in enumerate(step):
        if t >= 0:
            uf.union(x, t)
    groups = [frozenset(gr) for gr in uf.groups() if any(certified[v] for v in gr)]
    orbit_of = [-1] * n
    for i, gr in enumerate(groups):
        for v in gr:
            orbit_of[v] = i
    roots = []
    for gr in groups:
        fixed = [v for v in sorted(gr) if step[v] == v]
        if len(fixed) > 1:
            raise InvariantViolation(f"orbit with several fixed points {fixed}")
        roots.append(fixed[0] if fixed else None)
    _check_acyclic(step)
    return FlowForest(g, U, tuple(step), tuple(groups), tuple(orbit_of), tuple(roots), certified, variant)


def _check_acyclic(step: list[int]) -> None:
    state = [0] * len(step)
    for s in range(len(step)):
        path = []
        v = s
        while v >= 0 and state[v] == 0:
            state[v] = 1
            path.append(v)
            t = step[v]
            v = -1 if t == v else t
        if v >= 0 and state[v] == 1:
            raise InvariantViolation(f"step map has a cycle through {v}")
        for p in path:
            state[p] = 2


def forward_orbit_root(ff: FlowForest, C: Iterable[int]) -> int | None:
    """Reference root: the vertex of the common forward orbit whose own forward orbit is all of it."""
    C = sorted(set(C))
    common = set(ff.forward_orbit(C[0]))
    for x in C[1:]:
        common &= set(ff.forward_orbit(x))
    for r in common:
        if set(ff.forward_orbit(r)) == common:
            return r
    return None


def _exit_point(ff: FlowForest, h: HalfSpace, x: int) -> int:
    """First iterate of ``x`` outside ``h``; it must lie on the outer boundary."""
    v = x
    while v in h.side:
        t = ff.step[v]
        if t < 0:
            raise CertificationError(f"orbit of {x} leaves the certified region before exiting half-space {h.id}")
        if t == v:
            raise InvariantViolation(f"orbit of {x} stalls at {v} inside a half-space missing the target")
        v = t
    if v not in h.boundary.outer:
        raise InvariantViolation(f"orbit of {x} exits half-space {h.id} away from its outer boundary")
    return v


def t_u_root(g: Graph, U: EndTarget, C: Iterable[int], H: HalfSpace,
             forest: FlowForest | None = None) -> int:
    """Root of ``C``: advance each point to where its orbit leaves ``H``, then meet the forward orbits."""
    C = sorted(set(C))
    if not C:
        raise ContractError("t_u_root needs a nonempty vertex set")
    ff = forest if forest is not None else flow_forest(g, U)
    if U.contains(H):
        raise ContractError(f"half-space {H.id} holds the target")
    if not set(C) <= H.side:
        raise ContractError("vertex set is not inside the given half-space")
    if len({ff.orbit_of[x] for x in C}) != 1 or ff.orbit_of[C[0]] < 0:
        raise ContractError("vertex set spans several orbits")
    exits = sorted({_exit_point(ff, H, x) for x in C})
    orbits = {x: ff.forward_orbit(x) for x in C}
    common = set.intersection(*(set(o) for o in orbits.values()))
    first = next((v for v in orbits[C[0]] if v in common), None)
    if first is None:
        raise CertificationError("forward orbits do not meet inside the certified region")
    if len(exits) == 1:
        if exits[0] not in set(ff.forward_orbit(first)):
            raise InvariantViolation("root is not behind the common exit point")
    else:
        exit_orbits = [ff.forward_orbit(p) for p in exits]
        meet = set.intersection(*(set(o) for o in exit_orbits))
        if next((v for v in exit_orbits[0] if v in meet), None) != first:
            raise InvariantViolation("exit points meet somewhere else than the root")
    return first


@dataclass(frozen=True)
class EnLevel:
    n: int
    classes: tuple[frozenset[int], ...]
    roots: tuple[frozenset[int] | None, ...]
    uncovered: tuple[bool, ...]


@dataclass(frozen=True)
class EnSequence:
    """Partitions ``E_0 ⊆ E_1 ⊆ ...`` of the certified vertices with their root sets.

    ``finite_orbits`` records which case of the dichotomy applies: with finitely
    many orbits the orbit relation itself is the witness and the sequence is
    reported only for inspection.
    """

    levels: tuple[EnLevel, ...]
    orbit_count: int
    finite_orbits: bool
    forest: FlowForest

    def to_dict(self) -> dict:
        lab = self.forest.graph.label
        return {"orbit_count": self.orbit_count, "finite_orbits": self.finite_orbits,
                "levels": [{"n": lv.n,
                            "classes": [sorted(lab(v) for v in c) for c in lv.classes],
                            "roots": [sorted(lab(v) for v in r) if r is not None else None for r in lv.roots],
                            "uncovered": list(lv.uncovered)} for lv in self.levels]}


def e_n_sequence(g: Graph, U: EndTarget, n_max: int, *, finite_orbits: bool | None = None) -> EnSequence:
    """Classes of vertices not split by any target-free half-space meeting more than ``n`` orbits.

    Roots of ``C ∩ O`` use a target-free half-space containing ``C`` when one
    exists; otherwise the class is flagged uncovered and the common forward
    orbit is used directly.  Unresolvable roots in windows are ``None``.
    """
    if n_max < 0:
        raise ContractError("n_max must be nonnegative")
    system = _system(g)
    ff = flow_forest(g, U)
    domain = [x for x in range(g.vertex_count) if ff.certified[x]]
    off = [h for h in system.halfspaces if not U.contains(h)]
    meets = [len({ff.orbit_of[v] for v in h.side if ff.certified[v]}) for h in off]
    levels = []
    previous = None
    for n in range(n_max + 1):
        splitters = [h for h, m in zip(off, meets) if m > n]
        buckets: dict[tuple[bool, ...], list[int]] = {}
        for x in domain:
            buckets.setdefault(tuple(x in h.side for h in splitters), []).append(x)
        classes = tuple(sorted((frozenset(b) for b in buckets.values()), key=min))
        if previous is not None and not all(any(c <= d for d in classes) for c in previous):
            raise InvariantViolation(f"E_{n - 1} is not contained in E_{n}")
        previous = classes
        roots, uncovered = [], []
        for c in classes:
            cover = next((h for h in off if c <= h.side), None)
            uncovered.append(cover is None)
            rs = set()
            for oid in sorted({ff.orbit_of[v] for v in c}):
                part = c & ff.orbits[oid]
                try:
                    r = t_u_root(g, U, part, cover, ff) if cover is not None else forward_orbit_root(ff, part)
                except CertificationError:
                    r = None
                if r is None:
                    rs = None
                    break
                rs.add(r)
            roots.append(frozenset(rs) if rs is not None else None)
        levels.append(EnLevel(n, classes, tuple(roots), tuple(uncovered)))
    count = len(ff.orbits)
    finite = (U.kind == "principal") if finite_orbits is None else finite_orbits
    return EnSequence(tuple(levels), count, finite, ff)


# -- windows of infinite families ------------------------------------------

@dataclass(frozen=True)
class WindowedFamily:
    family: str
    radius: int
    graph: MedianGraph
    target: EndTarget
    certified: tuple[bool, ...]
    finite_orbits: bool
    margin: int = 2

    def coordinates(self, v: int) -> tuple[int, ...]:
        lab = self.graph.label(v)
        return tuple(int(p) for p in lab.split(",")) if lab else ()

    def to_dict(self) -> dict:
        return {"family": self.family, "radius": self.radius, "margin": self.margin,
                "vertex_count": self.graph.vertex_count, "finite_orbits": self.finite_orbits,
                "certified": [self.graph.label(v) for v, c in enumerate(self.certified) if c]}


def _coords(g: Graph) -> list[tuple[int, ...]]:
    return [tuple(int(p) for p in g.label(v).split(",")) for v in range(g.vertex_count)]


def _increasing(pts: list[tuple[int, ...]]) -> Callable[[int, int], bool]:
    return lambda x, y: sum(pts[y]) > sum(pts[x])


def _regular_tree_window(d: int, r: int) -> tuple[Graph, list[tuple[int, ...]]]:
    """Ball of radius ``r`` in the ``d``-regular tree; vertices are child-index words."""
    words: list[tuple[int, ...]] = [()]
    edges = []
    frontier = [0]
    for _ in range(r):
        nxt = []
        for v in frontier:
            w = words[v]
            for c in range(d if not w else d - 1):
                words.append(w + (c,))
                edges.append((v, len(words) - 1))
                nxt.append(len(words) - 1)
        frontier = nxt
    labels = [",".join(map(str, w)) for w in words]
    return Graph.from_edges(len(words), edges, labels), words


def parse_family(spec: str) -> tuple[str, int | None]:
    m = re.fullmatch(r"\s*([a-z-]+)\s*(?:\(\s*(\d+)\s*\))?\s*", spec)
    if not m:
        raise ContractError(f"unknown window family {spec!r}")
    name = _ALIASES.get(m.group(1), m.group(1))
    if name not in FAMILIES:
        raise ContractError(f"unknown window family {spec!r}; choose from {', '.join(FAMILIES)}")
    return name, int(m.group(2)) if m.group(2) else None


def make_window(family: str, radius: int) -> WindowedFamily:
    """Finite window of a built-in one-ended family together with its end.

    A vertex is certified when its radius-2 ball in the infinite graph lies in
    the window, so its neighbours, its step target and the side of the end for
    each incident hyperplane are all exact.
    """
    name, param = parse_family(family)
    if radius < 1:
        raise ContractError("window radius must be at least 1")
    margin = 2
    if name == "quadrant-staircase":
        g = staircase(radius)
        pts = _coords(g)
        toward = _increasing(pts)
        cert = [max(p) <= radius - margin for p in pts]
        finite = True
    elif name == "grid-quadrant":
        g = grid(radius + 1, radius + 1)
        pts = _coords(g)
        toward = _increasing(pts)
        cert = [max(p) <= radius - margin for p in pts]
        finite = False
    elif name == "ladder":
        g = grid(radius + 1, 2)
        pts = _coords(g)

        def toward(x, y, pts=pts):
            if pts[x][0] != pts[y][0]:
                return pts[y][0] > pts[x][0]
            return pts[y][1] == 0

        cert = [p[0] <= radius - margin for p in pts]
        finite = True
    else:
        d = 3 if param is None else param
        if d < 2:
            raise ContractError("regular tree degree must be at least 2")
        g, words = _regular_tree_window(d, radius)
        index = {w: i for i, w in enumerate(words)}

        def toward(x, y, words=words, index=index):
            w = words[x]
            if all(c == 0 for c in w):
                return words[y] == w + (0,)
            return y == index[w[:-1]]

        cert = [len(w) <= radius - margin for w in words]
        finite = True
        name = f"regular-tree({d})"
    mg = as_median(g)
    descriptor = f"{name}:r={radius}"
    U = EndTarget.windowed(descriptor, toward, (v for v, c in enumerate(cert) if c))
    check_orientation(mg, U)
    return WindowedFamily(name, radius, mg, U, tuple(cert), finite, margin)


def principal_flow(g: MedianGraph, u: int) -> FlowForest:
    g.check_vertex(u)
    return flow_forest(g, EndTarget.principal(u))
