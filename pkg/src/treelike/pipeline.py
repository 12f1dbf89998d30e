"""Named end-to-end runs that turn tree-like input into trees or forests.

Each run works component by component and records every intermediate
artifact.  A failed contract stops the run and names the stage.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .cuts import CutFamily, all_radial_cuts, connectify, successor_distance_report, walling_finiteness_check
from .end_flow import EndTarget, WindowedFamily, e_n_sequence, flow_forest, make_window
from .errors import TreelikeError
from .graph import Graph
from .hyperplanes import halfspace_system, hyperplane_adjacency
from .io import cut_family_to_json, dumps, graph_to_json, treedec_to_json
from .median import MedianGraph, as_median, check_median
from .pocset import DEFAULT_CAP, Walling, proper_walling_report, wall_dual
from .tree_extract import extract_spanning_tree, verify_quasi_isometry
from .treedec import TreeDecomposition, heuristic_treedec, treedec_cuts, width_report

SCHEMA_VERSION = 1
PRESETS = ("median->tree", "quasitree->tree", "treedec->tree", "end->forest")


def canonical_preset(name: str) -> str:
    key = name.replace("→", "->").strip()
    if key not in PRESETS:
        raise PipelineAbort("preset", f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return key


class PipelineAbort(TreelikeError):
    """A stage's contract failed; ``stage`` names it and ``artifacts`` keeps what was built before."""

    def __init__(self, stage: str, detail: str, witness: Any = None, artifacts: dict | None = None,
                 checks: dict | None = None):
        super().__init__(f"stage {stage}: {detail}")
        self.checks = checks or {}
        self.stage = stage
        self.detail = detail
        self.witness = witness
        self.artifacts = artifacts or {}


@dataclass
class Report:
    preset: str
    artifacts: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    status: str = "ok"
    aborted_at: str | None = None
    detail: str | None = None

    def summary(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "preset": self.preset, "status": self.status,
               "artifacts": sorted(self.artifacts), "checks": dict(sorted(self.checks.items()))}
        if self.aborted_at is not None:
            out["aborted_at"] = self.aborted_at
            out["detail"] = self.detail
        return out

    def write(self, outdir: str | Path) -> Path:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in sorted(self.artifacts.items()):
            (out / f"{name}.json").write_text(dumps({"schema_version": SCHEMA_VERSION, "artifact": name,
                                                     "data": data}))
        (out / "summary.json").write_text(dumps(self.summary()))
        return out


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj


class _Run:
    """Collects artifacts for one component and converts failures into aborts."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.artifacts: dict[str, Any] = {}
        self.checks: dict[str, bool] = {}

    def stage(self, name: str, fn: Callable[[], Any], witness: Callable[[Exception], Any] | None = None):
        try:
            return fn()
        except TreelikeError as exc:
            w = witness(exc) if witness else getattr(exc, "witness", None)
            raise PipelineAbort(name, str(exc), _jsonable(w), dict(self.artifacts), dict(self.checks)) from exc

    def put(self, name: str, data: Any) -> None:
        self.artifacts[f"{self.prefix}{name}"] = data

    def check(self, name: str, ok: bool) -> None:
        self.checks[f"{self.prefix}{name}"] = bool(ok)


def _median_stage(run: _Run, g: Graph) -> MedianGraph:
    cert = check_median(g)
    run.put("check_median", cert.to_dict())
    run.check("check_median", bool(cert))
    if not cert:
        raise PipelineAbort("check_median", f"triple {cert.witness} has no unique median",
                            cert.to_dict(), dict(run.artifacts), dict(run.checks))
    return as_median(g)


def _tree_tail(run: _Run, mg: MedianGraph, label: Callable[[int], str]) -> None:
    sf = run.stage("spanning_tree", lambda: extract_spanning_tree(mg))
    qi = run.stage("quasi_isometry", lambda: verify_quasi_isometry(mg, sf, strict=False))
    tree = [[label(a), label(b)] for a, b in sorted(sf.tree)]
    run.put("spanning_tree", {"colors": sf.coloring.to_dict(), "tree": tree,
                              "stages": [len(s) for s in sf.stages]})
    run.put("quasi_isometry", qi.to_dict())
    run.check("spanning_tree", len(tree) == max(mg.vertex_count - 1, 0))
    run.check("quasi_isometry", qi.holds)


def _median_tree(run: _Run, g: Graph) -> None:
    mg = _median_stage(run, g)
    system = run.stage("hyperplanes", lambda: halfspace_system(mg))
    adj = run.stage("hyperplanes", lambda: hyperplane_adjacency(mg))
    run.put("hyperplanes", {"count": system.hyperplane_count,
                            "sides": [[[g.label(v) for v in sorted(system.get(i).side)] for i in pair]
                                      for pair in system.hyperplane_sides],
                            "adjacency": [list(e) for e in sorted(adj.by_boundary)]})
    _tree_tail(run, mg, g.label)


def _walling_tail(run: _Run, g: Graph, fam: CutFamily, cap: int | None) -> None:
    conn = run.stage("connectify", lambda: connectify(g, fam, close=True))
    run.put("connectify", cut_family_to_json(conn))
    fin = walling_finiteness_check(g, conn)
    succ = successor_distance_report(g, conn)
    walling = Walling.build(g.labels, [[g.label(v) for v in c.side] for c in conn.cuts])
    proper = proper_walling_report(walling)
    run.put("walling_check", {"boundary_counts": list(fin.counts), "max_boundary_count": fin.maximum,
                              "successor_distances": succ.to_dict(), "proper": proper.to_dict()})
    run.check("walling_complement_closed", conn.complement_closed)
    wd = run.stage("dual", lambda: wall_dual(walling, cap))
    dual = wd.dual.graph
    run.put("dual", {"graph": graph_to_json(dual),
                     "point_map": {g.label(x): dual.label(i) for x, i in enumerate(wd.point_map)}})
    _tree_tail(run, dual, dual.label)


def _quasitree_tree(run: _Run, g: Graph, cap: int | None) -> None:
    fam = run.stage("radial_cuts", lambda: all_radial_cuts(g, close=True))
    run.put("radial_cuts", cut_family_to_json(fam))
    _walling_tail(run, g, fam, cap)


def _treedec_tree(run: _Run, g: Graph, td: TreeDecomposition | None, cap: int | None) -> None:
    if td is None:
        td = run.stage("treedec", lambda: heuristic_treedec(g))
    run.put("treedec", dict(treedec_to_json(td), width=width_report(td).width))
    fam = run.stage("treedec_cuts", lambda: treedec_cuts(td, close=True))
    run.put("treedec_cuts", cut_family_to_json(fam))
    _walling_tail(run, g, fam, cap)


def _end_forest(run: _Run, g: Graph, target: EndTarget, n_max: int, finite_orbits: bool | None) -> None:
    mg = g if isinstance(g, MedianGraph) else _median_stage(run, g)
    ff = run.stage("flow", lambda: flow_forest(mg, target))
    run.put("flow", ff.to_dict())
    seq = run.stage("e_n", lambda: e_n_sequence(mg, target, n_max, finite_orbits=finite_orbits))
    run.put("e_n", seq.to_dict())
    run.check("flow_monotone", True)  # flow_forest raises otherwise


def run_pipeline(source: Graph | WindowedFamily | str, preset: str, *, treedec: TreeDecomposition | None = None,
                 target: int | None = None, radius: int = 8, n_max: int = 3,
                 cap: int | None = DEFAULT_CAP, workers: int = 1) -> Report:
    """Run ``preset`` on a graph (componentwise) or, for ``end->forest``, on a window family.

    Components are processed concurrently when ``workers > 1``; results are
    merged in order of each component's least vertex id.
    """
    preset = canonical_preset(preset)
    report = Report(preset)
    if preset == "end->forest" and not isinstance(source, Graph):
        window = source if isinstance(source, WindowedFamily) else make_window(str(source), radius)
        run = _Run("")
        run.put("window", window.to_dict())
        try:
            _end_forest(run, window.graph, window.target, n_max, window.finite_orbits)
        except PipelineAbort as exc:
            return _aborted(report, exc)
        report.artifacts, report.checks = run.artifacts, run.checks
        return report
    if not isinstance(source, Graph):
        raise PipelineAbort("input", f"preset {preset} needs a graph")
    g = source
    comps = g.connected_components() or [frozenset()]
    if treedec is not None and len(comps) > 1:
        raise PipelineAbort("treedec", "a supplied decomposition needs a connected graph")

    def one(i_comp):
        i, comp = i_comp
        sub, old = g.induced_subgraph(sorted(comp)) if len(comps) > 1 else (g, tuple(range(g.vertex_count)))
        run = _Run(f"c{i}." if len(comps) > 1 else "")
        run.put("graph", graph_to_json(sub))
        if preset == "median->tree":
            _median_tree(run, sub)
        elif preset == "quasitree->tree":
            _quasitree_tree(run, sub, cap)
        elif preset == "treedec->tree":
            _treedec_tree(run, sub, treedec, cap)
        else:
            u = old.index(target) if target is not None and target in comp else 0
            mg = _median_stage(run, sub)
            _end_forest(run, mg, EndTarget.principal(u), n_max, None)
        return run

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                runs = list(pool.map(one, enumerate(comps)))
        else:
            runs = [one(item) for item in enumerate(comps)]
    except PipelineAbort as exc:
        return _aborted(report, exc)
    for run in runs:
        report.artifacts.update(run.artifacts)
        report.checks.update(run.checks)
    return report


def _aborted(report: Report, exc: PipelineAbort) -> Report:
    report.status = "aborted"
    report.aborted_at = exc.stage
    report.detail = exc.detail
    report.artifacts.update(exc.artifacts)
    report.checks.update(exc.checks)
    if exc.witness is not None:
        report.artifacts["abort_witness"] = exc.witness
    return report
