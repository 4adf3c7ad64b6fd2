import csv
import io
import json
import math

import pytest

from mcsp.bench import (FIGURES, BenchRow, EmptyGroup, emit, grid_instances, instance_seed,
                        run_directory, run_grid, summarize, write_outputs)
from mcsp.catalog import build_catalog, count_variables
from mcsp.instance import Instance, write_instance


def row(model, value, n=10, sigma=2, **kw):
    base = dict(instance_id="x", n=n, sigma=sigma, model_kind=model, value=value,
                time_first_s=0.0, time_best_s=0.0, optimal=True, opt_gap_pct=0.0,
                lp_gap_pct=0.0, num_vars=10, nodes=1)
    base.update(kw)
    return BenchRow(**base)


@pytest.fixture(scope="module")
def grid():
    return run_grid([20], [4, 12, 20], 10, 1, 30.0)


def test_grid_shape(grid):
    assert len(grid) == 60
    assert [r.model_kind for r in grid[:4]] == ["cb", "cs", "cb", "cs"]
    assert all(r.verified and not r.error for r in grid)


def test_grid_row_invariants(grid):
    insts = {iid: inst for iid, inst, _ in grid_instances([20], [4, 12, 20], 10, 1)}
    for r in grid:
        cb, cs = count_variables(build_catalog(insts[r.instance_id]))
        assert r.num_vars == (cb if r.model_kind == "cb" else cs)
        if r.optimal:
            assert r.opt_gap_pct == 0.0
            assert r.value >= math.ceil(r.lp_value - 1e-6)
    by_inst = {}
    for r in grid:
        by_inst.setdefault(r.instance_id, {})[r.model_kind] = r.value
    assert all(v["cb"] == v["cs"] for v in by_inst.values())


def test_grid_is_deterministic(grid):
    again = run_grid([20], [4], 10, 1, 30.0)
    strip = lambda r: (r.instance_id, r.model_kind, r.value, r.nodes, r.num_vars, r.lp_value)
    assert [strip(r) for r in again] == [strip(r) for r in grid[:20]]


def test_seeds_differ_by_cell():
    seeds = {instance_seed(1, n, s, i) for n in (10, 20) for s in (4, 12) for i in range(5)}
    assert len(seeds) == 20


def test_injected_cases():
    extra = [("worked", Instance("AGACTG", "ACTAGG")), ("same", Instance("ABCABD", "ABCABD"))]
    rows = run_grid([6], [2], 1, 1, 10.0, extra=extra)
    got = {(r.instance_id, r.model_kind): r for r in rows}
    for kind in ("cb", "cs"):
        assert got[("worked", kind)].value == 3
        assert got[("same", kind)].value == 1
        assert got[("same", kind)].nodes <= 1


def test_failed_row_is_flagged(monkeypatch):
    import mcsp.bench as bench

    def boom(*a, **k):
        raise RuntimeError("solver exploded")

    monkeypatch.setattr(bench, "branch_and_bound", boom)
    rows = run_grid([6], [2], 2, 1, 10.0)
    assert len(rows) == 4
    assert all("solver exploded" in r.error and not r.verified for r in rows)


def test_bad_grid_parameters():
    with pytest.raises(ValueError):
        run_grid([10], [2], 0, 1, 10.0)
    with pytest.raises(ValueError):
        run_grid([], [2], 1, 1, 10.0)


def test_summary_improvement():
    (cb, cs) = summarize([row("cb", 10), row("cs", 9)])
    assert cb.improvement_pct == pytest.approx(10.0)
    assert cs.improvement_pct == pytest.approx(10.0)


def test_summary_equal_optima(grid):
    for s in summarize(grid):
        if s.count_optimal == s.count:
            assert s.improvement_pct == 0.0
        assert s.improvement_pct >= -100.0
        assert s.count == 10


def test_summary_means():
    rows = [row("cs", 4, nodes=1), row("cs", 6, nodes=3, optimal=False, opt_gap_pct=20.0)]
    (s,) = summarize(rows)
    assert (s.mean_value, s.mean_nodes, s.count_optimal, s.mean_opt_gap_pct) == (5, 2, 1, 10.0)
    assert math.isnan(s.improvement_pct)


def test_empty_group():
    with pytest.raises(EmptyGroup):
        summarize([])


def test_emit_csv(grid):
    buf = io.StringIO()
    emit(rows=grid, fmt="csv", sink=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 61
    assert lines[0].startswith("instance_id,n,sigma,model_kind,value,time_first_s")


def test_emit_json(grid):
    buf = io.BytesIO()
    emit(summaries=summarize(grid), fmt="json", sink=buf)
    data = json.loads(buf.getvalue())
    assert len(data) == 6
    assert {(d["n"], d["sigma"]) for d in data} == {(20, 4), (20, 12), (20, 20)}


def test_emit_errors(grid):
    with pytest.raises(ValueError):
        emit(rows=grid, fmt="xml", sink=io.StringIO())
    with pytest.raises(ValueError):
        emit(fmt="csv", sink=io.StringIO())


def test_write_outputs(grid, tmp_path):
    write_outputs(grid, tmp_path)
    for name in ["rows.csv", "summary.csv"] + [f"figdata_{m}.csv" for m in FIGURES]:
        assert (tmp_path / name).exists()
    with open(tmp_path / "figdata_time.csv") as fh:
        recs = list(csv.DictReader(fh))
    assert set(recs[0]) == {"sigma", "n", "model", "mean_time_first_s"}
    assert [r for r in recs if r["sigma"] == "4"] and len(recs) == 6


def test_run_directory(tmp_path):
    write_instance(Instance("AGACTG", "ACTAGG"), tmp_path / "b.txt")
    write_instance(Instance("AB", "BA"), tmp_path / "a.txt")
    rows = run_directory(tmp_path, 10.0)
    assert [(r.instance_id, r.model_kind, r.value) for r in rows] == [
        ("a", "cb", 2), ("a", "cs", 2), ("b", "cb", 3), ("b", "cs", 3)]
