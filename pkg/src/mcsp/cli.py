"""Command line entry point: ``mcsp {generate,stats,export,lp-compare,solve,bench}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench
from .catalog import build_blocks, build_catalog, catalog_stats
from .instance import InstanceError, generate_instance, read_instance, write_instance
from .lpformat import export
from .model import build_cb, build_cs
from .simplex import solve_lp
from .solve import branch_and_bound, trivial_solution

LP_COMPARE_TOL = 1e-6


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_generate(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        # consecutive seeds per file keep every file reproducible on its own
        seed = args.seed + i
        inst = generate_instance(args.n, args.sigma, seed)
        path = out / f"inst_{args.n}_{args.sigma}_{args.seed}_{i}.txt"
        write_instance(inst, path)
        print(path)
    return 0


def cmd_stats(args):
    st = catalog_stats(read_instance(args.file))
    cols = ["n", "sigma", "T", "m", "vars_cb", "vars_cs"]
    if args.header:
        print(",".join(cols))
    print(",".join(str(st[c]) for c in cols))
    return 0


def cmd_export(args):
    inst = read_instance(args.file)
    catalog = build_catalog(inst)
    model = build_cb(build_blocks(catalog), inst.n) if args.model == "cb" else build_cs(catalog, inst.n)
    if args.out == "-":
        export(model, args.format, sys.stdout.buffer)
    else:
        with open(args.out, "wb") as fh:
            export(model, args.format, fh)
    return 0


def cmd_lp_compare(args):
    inst = read_instance(args.file)
    catalog = build_catalog(inst)
    lp_cb = solve_lp(build_cb(build_blocks(catalog), inst.n)).objective_value
    lp_cs = solve_lp(build_cs(catalog, inst.n)).objective_value
    diff = abs(lp_cb - lp_cs)
    ok = diff <= LP_COMPARE_TOL * max(1.0, abs(lp_cb))
    print(f"LP_cb={lp_cb:.9f} LP_cs={lp_cs:.9f} diff={diff:.3e} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def cmd_solve(args):
    inst = read_instance(args.file)
    report = branch_and_bound(args.model, inst, args.time_limit, args.lp_bound == "on")
    if args.json:
        d = report.to_dict()
        d["trivial_value"] = trivial_solution(inst).value
        print(json.dumps(_json_safe(d)))
    else:
        print(f"status      {report.status.value}")
        print(f"value       {report.value}")
        print(f"lower bound {report.lower_bound:g}")
        print(f"LP value    {report.lp_value:.6f}")
        print(f"time X/Y    {report.time_to_first_s:.3f}/{report.time_to_best_s:.3f} s")
        print(f"gap         {report.opt_gap_pct:.2f}%  LP gap {report.lp_gap_pct:.2f}%")
        print(f"nodes       {report.nodes}   vars {report.num_vars}")
        for b in report.best.blocks:
            print(f"  {b.t}  s1@{b.k1}  s2@{b.k2}")
    return 0


def cmd_bench(args):
    if args.instances:
        rows = bench.run_directory(args.instances, args.time_limit, args.workers)
    else:
        rows = bench.run_grid(_int_list(args.ns), _int_list(args.sigmas), args.per_cell,
                              args.seed, args.time_limit, args.workers)
    summaries = bench.write_outputs(rows, args.out)
    bench.emit(summaries=summaries, fmt="csv", sink=sys.stdout)
    return 0 if all(not r.error for r in rows) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="mcsp", description="Exact ILP toolkit for minimum common string partition")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random related instances")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=int, required=True)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="print n, |sigma|, |T|, m, vars_cb, vars_cs as CSV")
    s.add_argument("file")
    s.add_argument("--header", action="store_true")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("export", help="write a model in LP or MPS format")
    e.add_argument("file")
    e.add_argument("--model", choices=["cb", "cs"], default="cs")
    e.add_argument("--format", choices=["lp", "mps"], default="lp")
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_export)

    c = sub.add_parser("lp-compare", help="LP relaxation values of both models")
    c.add_argument("file")
    c.set_defaults(func=cmd_lp_compare)

    v = sub.add_parser("solve", help="exact branch-and-bound")
    v.add_argument("file")
    v.add_argument("--model", choices=["cb", "cs"], default="cs")
    v.add_argument("--time-limit", type=float, default=60.0)
    v.add_argument("--lp-bound", choices=["on", "off"], default="on")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a benchmark grid")
    b.add_argument("--ns", default="50,100,150,200")
    b.add_argument("--sigmas", default="4,12,20")
    b.add_argument("--per-cell", type=int, default=10)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--time-limit", type=float, default=60.0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--instances", help="directory of instance files instead of a generated grid")
    b.add_argument("--out", default="bench_out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, OSError) as exc:
        print(f"mcsp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
