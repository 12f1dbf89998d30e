"""Reading and writing graphs, wallings, pocsets, cut families and decompositions; DOT export.

Vertex ids in files are arbitrary tokens.  When every id is an integer the
internal order is numeric, otherwise it is the order of first appearance.
Labels always keep the original token.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .cuts import CutFamily
from .errors import GraphFormatError
from .graph import Graph
from .pocset import Pocset, Walling, validate_pocset
from .treedec import TreeDecomposition, validate


def _token(x: Any) -> str:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise GraphFormatError(f"vertex id {x!r} must be an integer or a string")
    return str(x)


def _order_ids(ids: list[str]) -> list[str]:
    try:
        return sorted(ids, key=int)
    except ValueError:
        return ids


def build_graph(vertices: Iterable, edges: Iterable[Sequence]) -> Graph:
    """Graph from vertex tokens and edge token pairs; rejects duplicate edges and self-loops."""
    seen: dict[str, None] = {}
    for v in vertices:
        t = _token(v)
        if t in seen:
            raise GraphFormatError(f"vertex {t} declared twice")
        seen[t] = None
    pairs = []
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"edge {e!r} must have two endpoints")
        a, b = _token(e[0]), _token(e[1])
        seen.setdefault(a, None)
        seen.setdefault(b, None)
        pairs.append((a, b))
    order = _order_ids(list(seen))
    pos = {t: i for i, t in enumerate(order)}
    return Graph.from_edges(len(order), [(pos[a], pos[b]) for a, b in pairs], order)


def parse_graph_text(text: str) -> Graph:
    """Lines ``v <id>`` and ``e <u> <v>``; blank lines and ``#`` comments are skipped."""
    vertices, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "e" and len(parts) == 3:
            edges.append((parts[1], parts[2]))
        else:
            raise GraphFormatError(f"line {lineno}: expected 'v <id>' or 'e <u> <v>', got {raw.strip()!r}")
    return build_graph(vertices, edges)


def parse_graph_json(data: Mapping) -> Graph:
    if not isinstance(data, Mapping) or "edges" not in data and "vertices" not in data:
        raise GraphFormatError("graph JSON needs 'vertices' and/or 'edges'")
    return build_graph(data.get("vertices", []), data.get("edges", []))


def graph_to_json(g: Graph) -> dict:
    return {"vertices": [g.label(v) for v in range(g.vertex_count)],
            "edges": [[g.label(a), g.label(b)] for a, b in g.edges()]}


def graph_to_text(g: Graph) -> str:
    lines = [f"v {g.label(v)}" for v in range(g.vertex_count)]
    lines += [f"e {g.label(a)} {g.label(b)}" for a, b in g.edges()]
    return "\n".join(lines) + "\n"


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc.strerror}") from exc


def _load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{what} is not valid JSON: {exc}") from exc


def read_graph(path: str | Path) -> Graph:
    """JSON if the content starts with ``{``, the line format otherwise."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        return parse_graph_json(_load_json(text, str(path)))
    return parse_graph_text(text)


def write_graph(g: Graph, path: str | Path) -> None:
    p = Path(path)
    if p.suffix == ".json":
        p.write_text(dumps(graph_to_json(g)))
    else:
        p.write_text(graph_to_text(g))


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- other objects --------------------------------------------------------

def parse_walling(data: Mapping) -> Walling:
    if not isinstance(data, Mapping) or "ground" not in data or "walls" not in data:
        raise GraphFormatError("walling JSON needs 'ground' and 'walls'")
    return Walling.build(data["ground"], data["walls"])


def parse_pocset(data: Mapping) -> Pocset:
    if not isinstance(data, Mapping) or "elements" not in data:
        raise GraphFormatError("pocset JSON needs 'elements', 'order' and 'involution'")
    return validate_pocset(data)


def read_pocset_or_walling(path: str | Path) -> Pocset | Walling:
    data = _load_json(_read(path), str(path))
    if isinstance(data, Mapping) and "ground" in data:
        return parse_walling(data)
    return parse_pocset(data)


def _vertex_index(g: Graph, token: Any) -> int:
    t = _token(token)
    try:
        return g.vertex_of(t)
    except (KeyError, IndexError, ValueError) as exc:
        raise GraphFormatError(f"unknown vertex {t}") from exc


def parse_cut_family(g: Graph, data: Mapping) -> CutFamily:
    """Cut family JSON; the closure flag must match the data when given."""
    if not isinstance(data, Mapping) or "cuts" not in data:
        raise GraphFormatError("cut family JSON needs 'cuts'")
    sides = [[_vertex_index(g, v) for v in cut] for cut in data["cuts"]]
    fam = CutFamily.from_sides(g, sides, str(data.get("provenance", "custom")))
    claimed = data.get("closed_under_complement")
    if claimed is not None and bool(claimed) != fam.complement_closed:
        raise GraphFormatError(f"closed_under_complement is {bool(claimed)} but the cuts say "
                               f"{fam.complement_closed}")
    return fam


def cut_family_to_json(f: CutFamily) -> dict:
    g = f.graph
    return {"provenance": f.provenance, "closed_under_complement": f.complement_closed,
            "cuts": [[g.label(v) for v in sorted(c.side)] for c in f.cuts]}


def parse_treedec(g: Graph, data: Mapping) -> TreeDecomposition:
    """Skeleton edges plus bags keyed by skeleton node name; validated on load."""
    if not isinstance(data, Mapping) or "bags" not in data:
        raise GraphFormatError("tree decomposition JSON needs 'skeleton_edges' and 'bags'")
    names = [str(y) for y in data["bags"]]
    for a, b in data.get("skeleton_edges", []):
        for y in (str(a), str(b)):
            if y not in names:
                names.append(y)
    names = _order_ids(names)
    pos = {y: i for i, y in enumerate(names)}
    skeleton = Graph.from_edges(len(names), [(pos[str(a)], pos[str(b)]) for a, b in data.get("skeleton_edges", [])],
                                names)
    bags = {pos[str(y)]: [_vertex_index(g, x) for x in xs] for y, xs in data["bags"].items()}
    td, _ = validate(g, skeleton, bags, names)
    return td


def treedec_to_json(td: TreeDecomposition) -> dict:
    g = td.host
    labels = td.labels()
    bags = td.bags()
    return {"skeleton_edges": [[labels[a], labels[b]] for a, b in td.skeleton.edges()],
            "bags": {labels[y]: [g.label(x) for x in sorted(bags[y])] for y in range(len(bags))}}


def read_json(path: str | Path) -> Any:
    return _load_json(_read(path), str(path))


# -- DOT --------------------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: Graph, *, tree: Iterable[Sequence[int]] | None = None,
               orbits: Sequence[int] | None = None, cuts: Iterable[Iterable[int]] | None = None,
               name: str = "G") -> str:
    """Undirected DOT text with vertices and edges in id order.

    ``tree`` edges are drawn bold; ``orbits`` is a step map (``-1`` for none)
    whose non-loop steps are drawn bold and colored; each of ``cuts`` marks its
    members with a ``cuts`` attribute listing cut indices, and boundary edges
    of the first cut are dashed.
    """
    tree_set = {tuple(sorted(e)) for e in tree} if tree is not None else set()
    step_set = set()
    if orbits is not None:
        step_set = {tuple(sorted((x, t))) for x, t in enumerate(orbits) if t >= 0 and t != x}
    cut_list = [frozenset(c) for c in cuts] if cuts is not None else []
    lines = [f"graph {_quote(name)} {{"]
    for v in range(g.vertex_count):
        attrs = [f"label={_quote(g.label(v))}"]
        member = [str(i) for i, c in enumerate(cut_list) if v in c]
        if member:
            attrs.append(f"cuts={_quote(','.join(member))}")
            if 0 in (int(m) for m in member):
                attrs.append("style=filled")
        lines.append(f"  {v} [{', '.join(attrs)}];")
    first = cut_list[0] if cut_list else None
    for a, b in g.edges():
        styles, attrs = [], []
        if (a, b) in tree_set or (a, b) in step_set:
            styles.append("bold")
        if (a, b) in step_set:
            attrs += ["color=red", "penwidth=3"]
        if first is not None and (a in first) != (b in first):
            styles.append("dashed")
        if styles:
            attrs.insert(0, f"style={_quote(','.join(styles))}" if len(styles) > 1 else f"style={styles[0]}")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {a} -- {b}{suffix};")
    extra = sorted(step_set - set(g.edges()))
    for a, b in extra:
        lines.append(f"  {a} -- {b} [style=bold, color=red, penwidth=3, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
