import json

import pytest
from hypothesis import given, settings

from strategies import median_graphs
from treelike.generators import cycle, grid, path, random_graph, star
from treelike.graph import disjoint_union
from treelike.pipeline import PRESETS, PipelineAbort, canonical_preset, run_pipeline
from treelike.treedec import validate


def bundle(report, d):
    report.write(d)
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_preset_examples():
    r = run_pipeline(grid(3, 3), "median→tree")
    assert r.status == "ok" and all(r.checks.values())
    assert len(r.artifacts["spanning_tree"]["tree"]) == 8
    td, _ = validate(cycle(4), path(2), [[0, 1, 2], [0, 2, 3]])
    r = run_pipeline(cycle(4), "treedec->tree", treedec=td)
    assert r.status == "ok" and "dual" in r.artifacts and "spanning_tree" in r.artifacts
    r = run_pipeline(cycle(6), "median->tree")
    assert r.status == "aborted" and r.aborted_at == "check_median"
    assert len(r.artifacts["abort_witness"]["witness"]) == 3


def test_other_presets():
    r = run_pipeline(random_graph(10, 0.3, 2), "quasitree->tree")
    assert r.status == "ok" and r.checks["walling_complement_closed"]
    r = run_pipeline(grid(3, 3), "end->forest", target=8)
    assert r.status == "ok" and r.artifacts["flow"]["roots"] == ["2,2"]
    r = run_pipeline("quadrant-staircase", "end->forest", radius=8)
    assert r.artifacts["e_n"]["orbit_count"] == 4


def test_unknown_preset():
    assert canonical_preset("treedec→tree") == "treedec->tree"
    with pytest.raises(PipelineAbort):
        run_pipeline(grid(2, 2), "cubes->tree")
    assert len(PRESETS) == 4


@pytest.mark.parametrize("preset", ["median->tree", "quasitree->tree", "treedec->tree", "end->forest"])
def test_byte_identical_bundles(tmp_path, preset):
    g = disjoint_union(grid(2, 3), star(3))
    a = bundle(run_pipeline(g, preset), tmp_path / "a")
    b = bundle(run_pipeline(g, preset, workers=3), tmp_path / "b")
    assert a == b and "summary.json" in a


def strip_prefix(report, i):
    """Component ``i``'s artifacts with the ``c{i}.`` key prefix and ``{i}:`` label prefix removed."""
    pre, lab = f"c{i}.", f"{i}:"

    def walk(x):
        if isinstance(x, str) and x.startswith(lab):
            return x[len(lab):]
        if isinstance(x, list):
            return [walk(v) for v in x]
        if isinstance(x, dict):
            return {walk(k): walk(v) for k, v in x.items()}
        return x
    return {k[len(pre):]: walk(v) for k, v in report.artifacts.items() if k.startswith(pre)}


@pytest.mark.parametrize("preset", ["median->tree", "quasitree->tree", "treedec->tree", "end->forest"])
def test_componentwise(preset):
    parts = [grid(2, 2), path(4), star(3)]
    union = run_pipeline(disjoint_union(*parts), preset)
    assert union.status == "ok"
    for i, part in enumerate(parts):
        alone = run_pipeline(part, preset)
        mine = strip_prefix(union, i)
        assert set(mine) == set(alone.artifacts)
        for key in alone.artifacts:
            assert json.dumps(mine[key], sort_keys=True) == json.dumps(alone.artifacts[key], sort_keys=True)


@settings(max_examples=15, deadline=None)
@given(median_graphs(cap=32))
def test_median_tree_checks_pass(g):
    r = run_pipeline(g, "median->tree")
    assert r.status == "ok" and all(r.checks.values())
