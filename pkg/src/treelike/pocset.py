"""Finite pocsets, orientations, wallings and the duality with median graphs.

Elements are indexed ``0..n-1``.  Subsets of elements (orientations in
particular) are Python ints used as bitmasks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapExceededError, ContractError, InvariantViolation, PocsetError
from .graph import Graph
from .median import MedianGraph, as_median, require_median

DEFAULT_CAP = 1 << 20


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True, eq=False)
class Pocset:
    """A validated finite pocset.  Build with :func:`validate_pocset`."""

    names: tuple[str, ...]
    leq: np.ndarray = field(repr=False)
    neg: tuple[int, ...]
    zero: int

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def one(self) -> int:
        return self.neg[self.zero]

    @property
    def representatives(self) -> tuple[int, ...]:
        """Lower id of each complement pair, ascending."""
        return tuple(p for p in range(self.size) if p < self.neg[p])

    @property
    def pair_count(self) -> int:
        return self.size // 2

    def le(self, p: int, q: int) -> bool:
        return bool(self.leq[p, q])

    def up_mask(self, p: int) -> int:
        return self._masks()[0][p]

    def strict_down_mask(self, p: int) -> int:
        return self._masks()[1][p]

    def _masks(self):
        cached = self.__dict__.get("_mask_cache")
        if cached is None:
            up = [sum(1 << q for q in np.flatnonzero(self.leq[p])) for p in range(self.size)]
            down = [sum(1 << q for q in np.flatnonzero(self.leq[:, p]) if q != p) for p in range(self.size)]
            cached = (up, down)
            object.__setattr__(self, "_mask_cache", cached)
        return cached

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)) and not isinstance(name, bool):
            if 0 <= name < self.size:
                return int(name)
        try:
            return self.names.index(str(name))
        except ValueError:
            raise PocsetError("unknown-element", f"{name!r} is not an element") from None

    def is_orientation(self, U: int) -> bool:
        up, _ = self._masks()
        for p in range(self.size):
            inside = bool(U >> p & 1)
            if inside == bool(U >> self.neg[p] & 1):
                return False
            if inside and up[p] & ~U:
                return False
        return True

    def to_dict(self) -> dict:
        order = [[self.names[p], self.names[q]] for p, q in zip(*np.nonzero(self.leq)) if p != q]
        pairs = [[self.names[p], self.names[self.neg[p]]] for p in self.representatives]
        return {"elements": list(self.names), "order": order, "involution": pairs,
                "zero": self.names[self.zero]}


def validate_pocset(raw: Mapping, *, close: bool = True) -> Pocset:
    """Check the pocset axioms on raw data and return a :class:`Pocset`.

    ``raw`` holds ``elements`` (names), ``order`` (pairs ``[p, q]`` meaning
    ``p <= q``), ``involution`` (complement pairs) and optionally ``zero``.
    With ``close`` the order is closed under reflexivity, transitivity, the
    dual pairs ``¬q <= ¬p`` and ``0 <= p <= ¬0``; otherwise only reflexivity and
    transitivity are added and order reversal is checked.
    Violations raise :class:`PocsetError` naming the axiom.
    """
    names = tuple(str(e) for e in raw.get("elements", ()))
    if len(set(names)) != len(names):
        raise PocsetError("format", "duplicate element names")
    n = len(names)
    pos = {s: i for i, s in enumerate(names)}

    def idx(e) -> int:
        if isinstance(e, int) and not isinstance(e, bool) and str(e) not in pos:
            if 0 <= e < n:
                return e
        if str(e) in pos:
            return pos[str(e)]
        raise PocsetError("format", f"unknown element {e!r}")

    neg = [-1] * n
    for pair in raw.get("involution", ()):
        a, b = idx(pair[0]), idx(pair[1])
        if a == b:
            raise PocsetError("fixpoint-free", f"¬{names[a]} = {names[a]}")
        for x, y in ((a, b), (b, a)):
            if neg[x] not in (-1, y):
                raise PocsetError("involution", f"{names[x]} has two complements")
            neg[x] = y
    missing = [names[i] for i in range(n) if neg[i] == -1]
    if missing:
        raise PocsetError("involution", f"no complement given for {missing[0]}")

    leq = np.eye(n, dtype=bool)
    for pair in raw.get("order", ()):
        leq[idx(pair[0]), idx(pair[1])] = True

    if "zero" in raw:
        zero = idx(raw["zero"])
    elif "0" in pos:
        zero = pos["0"]
    else:
        zero = -1
    if close:
        for p, q in zip(*np.nonzero(leq.copy())):
            leq[neg[q], neg[p]] = True
        if zero >= 0:
            leq[zero, :] = True
            leq[:, neg[zero]] = True
    leq = _transitive_closure(leq)
    if zero < 0:
        least = [p for p in range(n) if leq[p].all()]
        if len(least) != 1:
            raise PocsetError("least-element", "no unique least element 0")
        zero = least[0]

    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        p, q = np.argwhere(both)[0]
        raise PocsetError("antisymmetry", f"{names[p]} <= {names[q]} <= {names[p]}")
    if not close:
        for p, q in zip(*np.nonzero(leq)):
            if not leq[neg[q], neg[p]]:
                raise PocsetError("order-reversing", f"{names[p]} <= {names[q]} but not ¬{names[q]} <= ¬{names[p]}")
    if not leq[zero].all():
        raise PocsetError("least-element", f"{names[zero]} is not below every element")
    if neg[zero] == zero:
        raise PocsetError("least-element", "0 = ¬0")
    for p in range(n):
        if p == zero or p == neg[zero]:
            continue
        lower = np.flatnonzero(leq[:, p] & leq[:, neg[p]])
        extra = [q for q in lower if q != zero]
        if extra:
            raise PocsetError("lower-bound", f"{names[extra[0]]} is a lower bound of "
                                             f"{names[p]} and ¬{names[p]}")
    leq.setflags(write=False)
    return Pocset(names, leq, tuple(neg), zero)


def _transitive_closure(leq: np.ndarray) -> np.ndarray:
    R = leq.copy()
    for k in range(R.shape[0]):
        R |= R[:, k:k + 1] & R[k:k + 1, :]
    return R


def simple_pocset(pairs: int, relations: Iterable[tuple[int, int]] = (),
                  names: Sequence[str] | None = None) -> Pocset:
    """Pocset on ``pairs`` complement pairs plus ``0, ¬0``.

    Element ``2i+2`` is ``p_i`` and ``2i+3`` is ``¬p_i``; ``relations`` are
    ``(a, b)`` element-index pairs meaning ``a <= b``.
    """
    base = names or [f"p{i}" for i in range(pairs)]
    elements = ["0", "1"] + [s for b in base for s in (b, "¬" + b)]
    inv = [[0, 1]] + [[2 * i + 2, 2 * i + 3] for i in range(pairs)]
    return validate_pocset({"elements": elements, "order": [list(r) for r in relations],
                            "involution": inv, "zero": 0})


# -- orientations ---------------------------------------------------------

def seed_orientation(p: Pocset) -> int:
    """Greedy orientation: ¬0 first, then the lower-id element of each undecided pair."""
    U = p.up_mask(p.one)
    for a in p.representatives:
        if U >> a & 1 or U >> p.neg[a] & 1:
            continue
        U |= p.up_mask(a)
    if not p.is_orientation(U):
        raise InvariantViolation("greedy seed is not an orientation")
    return U


def _sign_key(p: Pocset, U: int) -> tuple[int, ...]:
    return tuple(0 if U >> a & 1 else 1 for a in p.representatives)


def orientations(p: Pocset, cap: int | None = DEFAULT_CAP) -> list[int]:
    """All orientations as bitmasks, ordered by sign vector over representatives.

    Enumeration is a BFS from the greedy seed, flipping one minimal element
    other than ¬0 at a time.
    """
    seen, _ = _orientation_bfs(p, cap)
    return sorted(seen, key=lambda U: _sign_key(p, U))


def _orientation_bfs(p: Pocset, cap: int | None):
    _, down = p._masks()
    one = p.one
    start = seed_orientation(p)
    seen = {start}
    edges = []
    queue = deque([start])
    while queue:
        U = queue.popleft()
        for q in _bits(U):
            if q == one or down[q] & U:
                continue
            V = (U & ~(1 << q)) | (1 << p.neg[q])
            if V not in seen:
                seen.add(V)
                if cap is not None and len(seen) > cap:
                    raise CapExceededError(f"more than {cap} orientations")
                queue.append(V)
            if U < V:
                edges.append((U, V))
    return seen, edges


def orientation_names(p: Pocset, U: int) -> list[str]:
    return [p.names[q] for q in _bits(U)]


@dataclass(frozen=True)
class DualGraph:
    pocset: Pocset
    graph: Graph
    orientations: tuple[int, ...]

    def vertex_of(self, U: int) -> int:
        return self.orientations.index(U)


def dual_median_graph(p: Pocset, cap: int | None = DEFAULT_CAP) -> DualGraph:
    """Graph on orientations, adjacent when they differ in one complement pair."""
    seen, raw_edges = _orientation_bfs(p, cap)
    order = sorted(seen, key=lambda U: _sign_key(p, U))
    index = {U: i for i, U in enumerate(order)}
    edges = sorted({tuple(sorted((index[U], index[V]))) for U, V in raw_edges})
    labels = ["".join("+" if U >> a & 1 else "-" for a in p.representatives if a != p.zero) or "*"
              for U in order]
    g = Graph.from_edges(len(order), edges, labels)
    return DualGraph(p, as_median(g), tuple(order))


def orientation_distance(U: int, V: int) -> int:
    """``|U ∖ V|``."""
    return bin(U & ~V).count("1")


def orientation_median(U: int, V: int, W: int) -> int:
    """Elementwise majority."""
    return (U & V) | (V & W) | (U & W)


# -- half-space pocsets and roundtrips ------------------------------------

@dataclass(frozen=True)
class HalfspacePocset:
    pocset: Pocset
    sides: tuple[frozenset[int], ...]
    graph: MedianGraph

    def principal(self, x: int) -> int:
        """``x̂``: the elements whose side contains ``x``."""
        return sum(1 << i for i, s in enumerate(self.sides) if x in s)


def halfspace_pocset(g: MedianGraph) -> HalfspacePocset:
    """Half-spaces ordered by inclusion; element 0 is ∅, element 1 is the whole vertex set."""
    from .hyperplanes import halfspace_system

    system = halfspace_system(require_median(g))
    X = g.vertices
    sides = [frozenset(), X] + [h.side for h in system.halfspaces]
    names = ["0", "1"] + [f"H{h.id}" for h in system.halfspaces]
    neg = [1, 0] + [h.complement + 2 for h in system.halfspaces]
    p = _pocset_from_sets(names, sides, neg)
    return HalfspacePocset(p, tuple(sides), g)


def _pocset_from_sets(names, sides, neg) -> Pocset:
    n = len(sides)
    if n:
        width = max((max(s) for s in sides if s), default=-1) + 1
        M = np.zeros((n, max(width, 1)), dtype=np.int32)
        for i, s in enumerate(sides):
            M[i, list(s)] = 1
        outside = M @ (1 - M).T  # |S_i ∖ S_j|
        leq = outside == 0
    else:
        leq = np.zeros((0, 0), dtype=bool)
    pairs = [[i, neg[i]] for i in range(n) if i < neg[i]]
    order = [[int(a), int(b)] for a, b in zip(*np.nonzero(leq)) if a != b]
    return validate_pocset({"elements": names, "order": order, "involution": pairs, "zero": 0}, close=False)


@dataclass(frozen=True)
class GraphRoundtrip:
    dual: DualGraph
    mapping: tuple[int, ...]

    def __bool__(self) -> bool:
        return True


def roundtrip_graph(g: MedianGraph, cap: int | None = DEFAULT_CAP) -> GraphRoundtrip:
    """Check ``g ≅`` dual of its half-space pocset via ``x ↦ x̂``; raises on failure."""
    hp = halfspace_pocset(g)
    dual = dual_median_graph(hp.pocset, cap)
    index = {U: i for i, U in enumerate(dual.orientations)}
    mapping = []
    for x in range(g.vertex_count):
        U = hp.principal(x)
        if U not in index:
            raise InvariantViolation(f"principal orientation of {x} missing from the dual")
        mapping.append(index[U])
    if len(set(mapping)) != g.vertex_count or len(dual.orientations) != g.vertex_count:
        raise InvariantViolation("x ↦ x̂ is not a bijection onto orientations")
    image = {tuple(sorted((mapping[u], mapping[v]))) for u, v in g.edges()}
    if image != set(dual.graph.edges()):
        raise InvariantViolation("x ↦ x̂ does not preserve adjacency")
    return GraphRoundtrip(dual, tuple(mapping))


@dataclass(frozen=True)
class PocsetRoundtrip:
    dual: DualGraph
    back: HalfspacePocset
    mapping: tuple[int, ...]

    def __bool__(self) -> bool:
        return True


def roundtrip_pocset(p: Pocset, cap: int | None = DEFAULT_CAP) -> PocsetRoundtrip:
    """Check ``p ≅`` half-space pocset of its dual via ``p ↦ {U : p ∈ U}``; raises on failure."""
    dual = dual_median_graph(p, cap)
    back = halfspace_pocset(dual.graph)
    by_side = {s: i for i, s in enumerate(back.sides)}
    mapping = []
    for q in range(p.size):
        hat = frozenset(i for i, U in enumerate(dual.orientations) if U >> q & 1)
        if hat not in by_side:
            raise InvariantViolation(f"{p.names[q]}^ is not a half-space of the dual")
        mapping.append(by_side[hat])
    if len(set(mapping)) != p.size or back.pocset.size != p.size:
        raise InvariantViolation("p ↦ p̂ is not a bijection")
    Q = back.pocset
    for a in range(p.size):
        if mapping[p.neg[a]] != Q.neg[mapping[a]]:
            raise InvariantViolation(f"involution not preserved at {p.names[a]}")
        for b in range(p.size):
            if p.leq[a, b] != Q.leq[mapping[a], mapping[b]]:
                raise InvariantViolation(f"order not preserved at ({p.names[a]}, {p.names[b]})")
    return PocsetRoundtrip(dual, back, tuple(mapping))


# -- wallings -------------------------------------------------------------

@dataclass(frozen=True)
class Walling:
    """Complement-closed family of subsets of ``ground`` (indexed ``0..n-1``), trivial walls included."""

    ground: tuple[str, ...]
    walls: tuple[frozenset[int], ...]
    added: int = 0

    @classmethod
    def build(cls, ground: Sequence, walls: Iterable[Iterable]) -> "Walling":
        ground = tuple(str(x) for x in ground)
        if len(set(ground)) != len(ground):
            raise ContractError("duplicate ground elements")
        pos = {s: i for i, s in enumerate(ground)}
        X = frozenset(range(len(ground)))
        given = []
        for w in walls:
            ids = set()
            for x in w:
                if str(x) not in pos:
                    raise ContractError(f"wall element {x!r} not in the ground set")
                ids.add(pos[str(x)])
            given.append(frozenset(ids))
        family = set(given)
        closed = family | {X - w for w in family} | {frozenset(), X}
        ordered = sorted(closed, key=lambda w: (len(w), sorted(w)))
        return cls(ground, tuple(ordered), len(closed) - len(family))

    @property
    def size(self) -> int:
        return len(self.ground)

    def complement(self, w: frozenset[int]) -> frozenset[int]:
        return frozenset(range(self.size)) - w

    def nontrivial(self) -> list[frozenset[int]]:
        return [w for w in self.walls if 0 < len(w) < self.size]

    def to_dict(self) -> dict:
        return {"ground": list(self.ground), "walls": [[self.ground[i] for i in sorted(w)] for w in self.walls]}


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[frozenset[int], ...]
    representative: tuple[int, ...]


def blocks(w: Walling) -> BlockPartition:
    """Points with identical wall membership, each mapped to the least id of its block."""
    groups: dict[tuple, list[int]] = {}
    for x in range(w.size):
        groups.setdefault(tuple(x in s for s in w.walls), []).append(x)
    parts = sorted((frozenset(v) for v in groups.values()), key=min)
    rep = [0] * w.size
    for b in parts:
        for x in b:
            rep[x] = min(b)
    return BlockPartition(tuple(parts), tuple(rep))


def _walling_sides(w: Walling) -> tuple[Pocset, tuple[frozenset[int], ...]]:
    X = frozenset(range(w.size))
    sides = w.walls  # sorted by size, so the empty wall is element 0
    index = {s: i for i, s in enumerate(sides)}
    neg = [index[X - s] for s in sides]
    names = ["{" + ",".join(w.ground[i] for i in sorted(s)) + "}" for s in sides]
    return _pocset_from_sets(names, sides, neg), sides


def walling_pocset(w: Walling) -> Pocset:
    """Walls ordered by inclusion with set complement as involution."""
    return _walling_sides(w)[0]


@dataclass(frozen=True)
class WallDual:
    dual: DualGraph
    point_map: tuple[int, ...]
    pocset: Pocset
    sides: tuple[frozenset[int], ...]


def wall_dual(w: Walling, cap: int | None = DEFAULT_CAP) -> WallDual:
    """Dual median graph of the walling plus the map sending each point to its principal orientation."""
    p, sides = _walling_sides(w)
    dual = dual_median_graph(p, cap)
    index = {U: i for i, U in enumerate(dual.orientations)}
    pm = []
    for x in range(w.size):
        U = sum(1 << i for i, s in enumerate(sides) if x in s)
        if U not in index:
            raise InvariantViolation(f"principal orientation of point {w.ground[x]} missing")
        pm.append(index[U])
    return WallDual(dual, tuple(pm), p, sides)


@dataclass(frozen=True)
class ProperWallingReport:
    max_block_size: int
    max_non_nested: int
    max_successors: int
    max_separating: int
    block_count: int
    wall_count: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def proper_walling_report(w: Walling) -> ProperWallingReport:
    """Witnessing quantities for the proper-walling axioms on finite data.

    Non-nested counts are per wall over unoriented partner walls; successors
    are taken inside the family's inclusion order.
    """
    part = blocks(w)
    X = frozenset(range(w.size))
    walls = w.nontrivial()
    unoriented = sorted({min(s, X - s, key=lambda t: sorted(t)) for s in walls}, key=sorted)

    def is_nested(a, b):
        na, nb = X - a, X - b
        return not (a & b) or not (a & nb) or not (na & b) or not (na & nb)

    max_nn = 0
    for s in walls:
        count = sum(1 for t in unoriented if t != s and t != X - s and not is_nested(s, t))
        max_nn = max(max_nn, count)
    max_succ = 0
    for s in walls:
        supers = [t for t in walls if s < t]
        succ = [t for t in supers if not any(s < u < t for u in supers)]
        max_succ = max(max_succ, len(succ))
    max_sep = 0
    for x, y in combinations(range(w.size), 2):
        max_sep = max(max_sep, sum(1 for s in walls if y in s and x not in s),
                      sum(1 for s in walls if x in s and y not in s))
    return ProperWallingReport(max(len(b) for b in part.blocks) if part.blocks else 0,
                               max_nn, max_succ, max_sep, len(part.blocks), len(unoriented))
