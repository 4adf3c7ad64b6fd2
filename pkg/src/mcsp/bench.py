"""Benchmark grids: seeded instances, both models, per-cell averages.

Gaps use the incumbent value as denominator, e.g. ``opt_gap_pct =
100 (value - lower_bound) / value``.  Times are monotonic-clock seconds.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .catalog import build_catalog, count_variables
from .instance import Instance, generate_instance, read_instance
from .solve import branch_and_bound, verify

MODELS = ("cb", "cs")


class EmptyGroup(ValueError):
    pass


@dataclass
class BenchRow:
    instance_id: str
    n: int
    sigma: int
    model_kind: str
    value: float
    time_first_s: float
    time_best_s: float
    optimal: bool
    opt_gap_pct: float
    lp_gap_pct: float
    num_vars: int
    nodes: int
    lp_value: float = math.nan
    lower_bound: float = math.nan
    total_time_s: float = math.nan
    verified: bool = False
    error: str = ""


@dataclass
class BenchSummary:
    n: int
    sigma: int
    model_kind: str
    count: int
    count_optimal: int
    mean_value: float
    mean_time_first_s: float
    mean_time_best_s: float
    mean_opt_gap_pct: float
    mean_lp_gap_pct: float
    mean_num_vars: float
    mean_nodes: float
    improvement_pct: float


ROW_FIELDS = [f.name for f in fields(BenchRow)]
SUMMARY_FIELDS = [f.name for f in fields(BenchSummary)]


def instance_seed(seed0: int, n: int, sigma: int, i: int) -> int:
    """64-bit seed of the ``i``-th instance of cell ``(n, sigma)``."""
    return int(np.random.SeedSequence([seed0, n, sigma, i]).generate_state(1, np.uint64)[0])


def grid_instances(ns, sigmas, per_cell, seed0):
    """``(instance_id, Instance, sigma)`` for every grid cell; ``sigma`` is the
    requested alphabet size, which short strings may not use up."""
    for n in ns:
        for sigma in sigmas:
            for i in range(per_cell):
                inst = generate_instance(n, sigma, instance_seed(seed0, n, sigma, i))
                yield f"inst_{n}_{sigma}_{seed0}_{i}", inst, sigma


def solve_row(instance_id: str, inst: Instance, model_kind: str, time_limit_s: float,
              use_lp_bound: bool = True, sigma: int | None = None) -> BenchRow:
    if sigma is None:
        sigma = len(inst.sigma)
    try:
        catalog = build_catalog(inst)
        report = branch_and_bound(model_kind, inst, time_limit_s, use_lp_bound, catalog=catalog)
        vars_cb, vars_cs = count_variables(catalog)
        num_vars = vars_cb if model_kind == "cb" else vars_cs
        assert report.num_vars == num_vars
        ok = bool(verify(inst, report.best))
        return BenchRow(
            instance_id=instance_id, n=inst.n, sigma=sigma, model_kind=model_kind,
            value=report.value, time_first_s=report.time_to_first_s,
            time_best_s=report.time_to_best_s, optimal=report.status.value == "OPTIMAL",
            opt_gap_pct=report.opt_gap_pct, lp_gap_pct=report.lp_gap_pct, num_vars=num_vars,
            nodes=report.nodes, lp_value=report.lp_value, lower_bound=report.lower_bound,
            total_time_s=report.total_time_s, verified=ok,
            error="" if ok else "verification failed",
        )
    except Exception as exc:  # noqa: BLE001 - a failed row must not abort the grid
        return BenchRow(instance_id, inst.n, sigma, model_kind, math.nan, math.nan, math.nan,
                        False, math.nan, math.nan, 0, 0, error=f"{type(exc).__name__}: {exc}")


def _task(args):
    return solve_row(*args)


def run_instances(named_instances, time_limit_s: float, models=MODELS, workers: int = 1,
                  use_lp_bound: bool = True) -> list[BenchRow]:
    """Solve every ``(instance_id, Instance[, sigma])`` item with every model."""
    tasks = [(item[0], item[1], m, time_limit_s, use_lp_bound, *item[2:])
             for item in named_instances for m in models]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_task, tasks))
    else:
        rows = [_task(t) for t in tasks]
    order = {(t[0], t[2]): i for i, t in enumerate(tasks)}
    return sorted(rows, key=lambda r: order[(r.instance_id, r.model_kind)])


def run_grid(ns, sigmas, per_cell: int, seed0: int, time_limit_s: float, workers: int = 1,
             models=MODELS, extra=(), use_lp_bound: bool = True) -> list[BenchRow]:
    """Solve ``per_cell`` seeded instances per ``(n, sigma)`` cell with every model.

    ``extra`` is an iterable of ``(instance_id, Instance)`` pairs solved
    alongside the generated ones.
    """
    if per_cell < 1 or time_limit_s <= 0 or not ns or not sigmas:
        raise ValueError("grid parameters must be positive and non-empty")
    named = list(grid_instances(ns, sigmas, per_cell, seed0)) + list(extra)
    return run_instances(named, time_limit_s, models, workers, use_lp_bound)


def run_directory(directory, time_limit_s: float, workers: int = 1, models=MODELS) -> list[BenchRow]:
    """External-instance mode: every ``*.txt`` file in ``directory``, sorted by name."""
    named = [(p.stem, read_instance(p)) for p in sorted(Path(directory).glob("*.txt"))]
    return run_instances(named, time_limit_s, models, workers)


def _mean(values):
    vals = [v for v in values if v is not None and not (isinstance(v, float) and math.isnan(v))]
    return statistics.fmean(vals) if vals else math.nan


def summarize(rows: list[BenchRow]) -> list[BenchSummary]:
    if not rows:
        raise EmptyGroup("no rows to summarise")
    groups = {}
    for r in rows:
        groups.setdefault((r.n, r.sigma, r.model_kind), []).append(r)
    cell_value = {key: _mean(r.value for r in grp) for key, grp in groups.items()}
    out = []
    for (n, sigma, kind), grp in sorted(groups.items()):
        if not grp:
            raise EmptyGroup(f"group {(n, sigma, kind)} is empty")
        cb, cs = cell_value.get((n, sigma, "cb")), cell_value.get((n, sigma, "cs"))
        impr = 100.0 * (cb - cs) / cb if cb and cs is not None and cb > 0 else math.nan
        out.append(BenchSummary(
            n=n, sigma=sigma, model_kind=kind, count=len(grp),
            count_optimal=sum(r.optimal for r in grp),
            mean_value=_mean(r.value for r in grp),
            mean_time_first_s=_mean(r.time_first_s for r in grp),
            mean_time_best_s=_mean(r.time_best_s for r in grp),
            mean_opt_gap_pct=_mean(r.opt_gap_pct for r in grp),
            mean_lp_gap_pct=_mean(r.lp_gap_pct for r in grp),
            mean_num_vars=_mean(r.num_vars for r in grp),
            mean_nodes=_mean(r.nodes for r in grp),
            improvement_pct=impr,
        ))
    return out


FIGURES = {
    "time": "mean_time_first_s",
    "gap": "mean_opt_gap_pct",
    "vars": "mean_num_vars",
}


def figure_series(summaries: list[BenchSummary], metric: str) -> list[dict]:
    """Long-format series ``(sigma, n, model, mean_<metric>)`` for plotting."""
    column = FIGURES[metric]
    return [{"sigma": s.sigma, "n": s.n, "model": s.model_kind, column: getattr(s, column)}
            for s in summaries]


def _records(items):
    return [asdict(x) if not isinstance(x, dict) else x for x in items]


def _write(records, columns, fmt, sink):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(records, indent=1, default=_json_default) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def emit(rows=None, summaries=None, fmt: str = "csv", sink=None) -> None:
    """Write rows or summaries (whichever is given) in CSV or JSON."""
    if (rows is None) == (summaries is None):
        raise ValueError("pass exactly one of rows / summaries")
    if rows is not None:
        _write(_records(rows), ROW_FIELDS, fmt, sink)
    else:
        _write(_records(summaries), SUMMARY_FIELDS, fmt, sink)


def write_outputs(rows: list[BenchRow], out_dir) -> list[BenchSummary]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = summarize(rows)
    with open(out / "rows.csv", "w", encoding="utf-8", newline="") as fh:
        emit(rows=rows, fmt="csv", sink=fh)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        emit(summaries=summaries, fmt="csv", sink=fh)
    for metric, column in FIGURES.items():
        with open(out / f"figdata_{metric}.csv", "w", encoding="utf-8", newline="") as fh:
            _write(figure_series(summaries, metric), ["sigma", "n", "model", column], "csv", fh)
    return summaries
