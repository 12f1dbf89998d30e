"""Command-line entry point: ``treelike <command> ...``.

Data commands print JSON.  ``--dot`` switches to DOT where a graph is the
natural output, and ``--json`` turns the one-line verdicts of
``check-median``, ``treedec validate`` and ``pipeline`` into JSON.
Errors go to stderr with exit status 2; a rejected median check exits 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .cuts import all_radial_cuts, connectify, radial_cuts, CutFamily
from .end_flow import EndTarget, e_n_sequence, flow_forest, make_window
from .errors import TreelikeError
from .generators import DEFAULT_CAP as GEN_CAP, generate
from .graph import Graph
from .hyperplanes import halfspace_system, hyperplane_adjacency
from .io import (cut_family_to_json, dumps, export_dot, graph_to_json, graph_to_text, parse_cut_family,
                 parse_treedec, read_graph, read_json, read_pocset_or_walling, treedec_to_json)
from .median import as_median, check_median
from .pipeline import PRESETS, run_pipeline
from .pocset import DEFAULT_CAP as POCSET_CAP, Walling, dual_median_graph, orientation_names, \
    proper_walling_report, wall_dual
from .tree_extract import (color_halfspaces, extract_spanning_tree, oneended_axiom_check, oneended_fer_witness,
                           oneended_fer_witness_rank, verify_quasi_isometry)
from .treedec import heuristic_treedec, prune_skeleton, shrink_bags, treedec_cuts, width_report


class _Out:
    def __init__(self, args):
        self.args = args

    def json(self, obj) -> None:
        sys.stdout.write(dumps(obj))

    def text(self, s: str) -> None:
        sys.stdout.write(s if s.endswith("\n") else s + "\n")


def _vertex(g: Graph, token: str) -> int:
    return g.vertex_of(int(token) if token.isdigit() and token not in g.labels else token)


# -- commands ---------------------------------------------------------------

def cmd_check_median(args, out: _Out) -> int:
    g = read_graph(args.graph)
    cert = check_median(g)
    data = cert.to_dict()
    if cert.witness is not None:
        data["witness_labels"] = [g.label(v) for v in cert.witness]
    if args.json:
        out.json(data)
    elif cert:
        out.text("accepted: median graph")
    else:
        out.text(f"rejected: triple {tuple(data['witness_labels'])} has "
                 f"{len(cert.intersection)} candidate medians")
    return 0 if cert else 1


def cmd_hyperplanes(args, out: _Out) -> int:
    g = as_median(read_graph(args.graph))
    system = halfspace_system(g)
    adj = hyperplane_adjacency(g)
    if args.dot:
        labels = [f"W{i}" for i in range(system.hyperplane_count)]
        out.text(export_dot(Graph(adj.graph.adjacency, labels), name="hyperplanes"))
        return 0
    lab = g.label
    out.json({
        "classes": [[[lab(a), lab(b)] for a, b in edges] for edges in system.hyperplane_edges],
        "sides": [[[lab(v) for v in sorted(system.get(i).side)] for i in pair] for pair in system.hyperplane_sides],
        "nested": system.nested_matrix().astype(int).tolist(),
        "adjacency": [list(e) for e in sorted(adj.by_boundary)],
    })
    return 0


def cmd_dual(args, out: _Out) -> int:
    obj = read_pocset_or_walling(args.source)
    if isinstance(obj, Walling):
        wd = wall_dual(obj, args.cap or POCSET_CAP)
        dual, p = wd.dual, wd.pocset
        extra = {"added_walls": obj.added, "proper": proper_walling_report(obj).to_dict(),
                 "point_map": {obj.ground[x]: dual.graph.label(i) for x, i in enumerate(wd.point_map)}}
    else:
        dual, p = dual_median_graph(obj, args.cap or POCSET_CAP), obj
        extra = {}
    if args.dot:
        out.text(export_dot(dual.graph, name="dual"))
        return 0
    g = dual.graph
    out.json(dict(extra, vertices=[g.label(v) for v in range(g.vertex_count)],
                  orientations=[orientation_names(p, U) for U in dual.orientations],
                  edges=[[g.label(a), g.label(b)] for a, b in g.edges()]))
    return 0


def cmd_spanning_tree(args, out: _Out) -> int:
    g = as_median(read_graph(args.graph))
    coloring = None
    if args.bounded:
        D, R = args.bounded
        coloring = color_halfspaces(g, "bounded", D, R)
    sf = extract_spanning_tree(g, coloring)
    qi = verify_quasi_isometry(g, sf, strict=False)
    if args.stages_json:
        Path(args.stages_json).write_text(dumps(sf.to_dict()))
    if args.dot:
        out.text(export_dot(g, tree=sf.tree))
        return 0
    out.json({"tree": [[g.label(a), g.label(b)] for a, b in sorted(sf.tree)],
              "coloring": sf.coloring.to_dict(), "quasi_isometry": qi.to_dict()})
    return 0


def cmd_radial_cuts(args, out: _Out) -> int:
    g = read_graph(args.graph)
    if args.center is None:
        fam = all_radial_cuts(g, close=args.close)
    else:
        c = _vertex(g, args.center)
        radii = [args.radius] if args.radius is not None else range(int(g.distances[c].max()) + 1)
        sides = [cut.side for r in radii for cut in radial_cuts(g, c, r)]
        fam = CutFamily.from_sides(g, sides, "radial", args.close)
    if args.dot:
        out.text(export_dot(g, cuts=[c.side for c in fam.cuts]))
        return 0
    data = cut_family_to_json(fam)
    data["boundary_diameters"] = [c.diameter for c in fam.cuts]
    out.json(data)
    return 0


def cmd_connectify(args, out: _Out) -> int:
    g = read_graph(args.graph)
    fam = parse_cut_family(g, read_json(args.family))
    res = connectify(g, fam, close=args.close)
    if args.dot:
        out.text(export_dot(g, cuts=[c.side for c in res.cuts]))
        return 0
    out.json(cut_family_to_json(res))
    return 0


def cmd_treedec(args, out: _Out) -> int:
    g = read_graph(args.graph)
    td = parse_treedec(g, read_json(args.treedec)) if args.treedec else heuristic_treedec(g)
    if args.action == "validate":
        rep = width_report(td)
        if args.json:
            out.json({"valid": True, "width": rep.width, "bag_sizes": list(rep.bag_sizes)})
        else:
            out.text(f"valid: width {rep.width}")
        return 0
    if args.action == "cuts":
        out.json(cut_family_to_json(treedec_cuts(td, close=args.close)))
        return 0
    res = shrink_bags(td) if args.action == "shrink" else prune_skeleton(td)
    out.json(dict(treedec_to_json(res), width=width_report(res).width))
    return 0


def cmd_flow(args, out: _Out) -> int:
    if args.family:
        w = make_window(args.family, args.radius)
        g, U, finite = w.graph, w.target, w.finite_orbits
        header = {"window": w.to_dict()}
    else:
        if not args.graph or args.target is None:
            raise TreelikeError("flow needs a graph with --target, or --family")
        g = as_median(read_graph(args.graph))
        U, finite, header = EndTarget.principal(_vertex(g, args.target)), None, {}
    ff = flow_forest(g, U, variant=args.variant)
    data = dict(header, **ff.to_dict())
    if args.n_max is not None:
        data["e_n"] = e_n_sequence(g, U, args.n_max, finite_orbits=finite).to_dict()
    if args.emit:
        Path(args.emit).write_text(dumps(data))
    if args.dot:
        out.text(export_dot(g, orbits=ff.step, name="flow"))
    elif not args.emit:
        out.json(data)
    return 0


def cmd_hypfin_witness(args, out: _Out) -> int:
    data = read_json(args.walling)
    if "ground" not in data or "walls" not in data:
        raise TreelikeError("hypfin-witness needs walling JSON with 'ground' and 'walls'")
    fn = oneended_fer_witness_rank if args.rank else oneended_fer_witness
    seq = fn(data["ground"], data["walls"])
    report = oneended_axiom_check(data["ground"], data["walls"])
    out.json(dict(seq.to_dict(), variant="rank" if args.rank else "cardinality",
                  increasing=seq.is_increasing(), full_at_end=seq.is_full_at_end(), axioms=report.to_dict()))
    return 0


def cmd_generate(args, out: _Out) -> int:
    g = generate(args.spec, cap=args.cap or GEN_CAP, seed=args.seed)
    if args.dot:
        text = export_dot(g)
    elif args.json or (args.output and args.output.endswith(".json")):
        text = dumps(graph_to_json(g))
    else:
        text = graph_to_text(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.text(text)
    return 0


def cmd_pipeline(args, out: _Out) -> int:
    if args.family:
        source = make_window(args.family, args.radius)
    elif args.graph:
        source = read_graph(args.graph)
    else:
        raise TreelikeError("pipeline needs a graph or --family")
    td = None
    if args.treedec:
        td = parse_treedec(source, read_json(args.treedec))
    target = _vertex(source, args.target) if args.target is not None and isinstance(source, Graph) else None
    report = run_pipeline(source, args.preset, treedec=td, target=target, n_max=args.n_max,
                          cap=args.cap or POCSET_CAP, workers=args.workers)
    if args.out:
        report.write(args.out)
    summary = report.summary()
    if args.json:
        out.json(summary)
    elif report.status == "ok":
        out.text(f"ok: {report.preset}, {len(report.artifacts)} artifacts"
                 + (f" in {args.out}" if args.out else ""))
    else:
        out.text(f"aborted at {report.aborted_at}: {report.detail}")
    return 0 if report.status == "ok" else 1


def cmd_export_dot(args, out: _Out) -> int:
    g = read_graph(args.graph)
    tree = orbits = cuts = None
    if args.overlay == "tree":
        tree = extract_spanning_tree(as_median(g)).tree
    elif args.overlay == "orbits":
        mg = as_median(g)
        orbits = flow_forest(mg, EndTarget.principal(_vertex(g, args.target or "0"))).step
    elif args.overlay == "cuts":
        if not args.cuts:
            raise TreelikeError("--overlay cuts needs --cuts FILE")
        cuts = [c.side for c in parse_cut_family(g, read_json(args.cuts)).cuts]
    out.text(export_dot(g, tree=tree, orbits=orbits, cuts=cuts))
    return 0


# -- parser -------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False), help="JSON output for verdict commands")
    p.add_argument("--dot", action="store_true", default=d(False), help="DOT output where supported")
    p.add_argument("--seed", type=int, default=d(None), help="seed for generators that take one")
    p.add_argument("--cap", type=int, default=d(None), help="size cap for generators and orientation enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treelike", description="Median graphs, wallings, cuts and flows.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _globals(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("check-median", cmd_check_median, "accept or reject a graph as median")
    p.add_argument("graph")
    p = add("hyperplanes", cmd_hyperplanes, "hyperplanes, half-spaces, nestedness and adjacency")
    p.add_argument("graph")
    p = add("dual", cmd_dual, "dual median graph of a pocset or walling")
    p.add_argument("source")
    p = add("spanning-tree", cmd_spanning_tree, "staged canonical spanning tree")
    p.add_argument("graph")
    p.add_argument("--bounded", nargs=2, type=int, metavar=("D", "R"), help="bounded coloring mode")
    p.add_argument("--stages-json", metavar="FILE", help="write all stages and blocks here")
    p = add("radial-cuts", cmd_radial_cuts, "components outside balls")
    p.add_argument("graph")
    p.add_argument("--center")
    p.add_argument("--radius", type=int)
    p.add_argument("--close", action="store_true", help="close the family under complement")
    p = add("connectify", cmd_connectify, "flip-flip connected cuts from a complement-closed family")
    p.add_argument("graph")
    p.add_argument("family")
    p.add_argument("--close", action="store_true")
    p = add("treedec", cmd_treedec, "tree decompositions: validate, shrink, prune, cuts")
    p.add_argument("action", choices=("validate", "shrink", "prune", "cuts"))
    p.add_argument("graph")
    p.add_argument("treedec", nargs="?", help="decomposition JSON (default: min-degree heuristic)")
    p.add_argument("--close", action="store_true")
    p = add("flow", cmd_flow, "flow toward a vertex or the end of a window family")
    p.add_argument("graph", nargs="?")
    p.add_argument("--target")
    p.add_argument("--family")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--emit", metavar="FILE", help="write the orbit JSON here")
    p.add_argument("--n-max", type=int, help="also compute E_0..E_n with root sets")
    p.add_argument("--variant", choices=("canonical", "single"), default="canonical")
    p = add("hypfin-witness", cmd_hypfin_witness, "F_n sequence for a one-ended walling")
    p.add_argument("walling")
    p.add_argument("--rank", action="store_true", help="rank variant")
    p = add("generate", cmd_generate, "built-in median graph generators")
    p.add_argument("spec", help='e.g. "grid(3,3)" or "median_closure(6,5,1)"')
    p.add_argument("-o", "--output")
    p = add("pipeline", cmd_pipeline, "run a preset and write a report bundle")
    p.add_argument("preset", help=" | ".join(PRESETS))
    p.add_argument("graph", nargs="?")
    p.add_argument("--family")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--treedec")
    p.add_argument("--target")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="DIR")
    p = add("export-dot", cmd_export_dot, "DOT rendering with optional overlay")
    p.add_argument("graph")
    p.add_argument("--overlay", choices=("none", "tree", "orbits", "cuts"), default="none")
    p.add_argument("--target")
    p.add_argument("--cuts", metavar="FILE")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, _Out(args))
    except TreelikeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
