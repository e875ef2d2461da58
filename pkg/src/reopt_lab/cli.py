"""Command-line entry point.

Subcommands: generate, load, analyze, run, explain, bench, sweep, ladder.
A JSON config file may supply any flag; explicit command-line values win.
Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path

from .bench import (
    Bench,
    BenchConfig,
    ladder_to_csv,
    perfect_ladder,
    report_filename,
    run_bench,
    top_k_report,
)
from .cardinality import Estimator, EstimatorConfig, request_for
from .errors import EngineError
from .executor import execute, execute_to_temp, explain_analyze
from .optimizer import OptimizerConfig, explain, optimize
from .reopt import (
    ReoptConfig,
    improvement_to_csv,
    run_with_reopt,
    selective_improvement,
    sweep_to_csv,
    threshold_sweep,
)
from .sql import CreateTempSpec, join_graph, parse
from .stats import analyze, analyze_catalog, analyze_temp, stats_to_json
from .storage import Catalog, ColumnMeta, ColumnType, write_csv
from .workload import WORKLOAD_SQL, GeneratorSpec, build_corpus, corpus_specs, generate

DEFAULT_SEED = 7


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we want 1
        raise _UsageError(message)


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("REOPT_LAB_SEED")
    return int(env) if env else DEFAULT_SEED


def _manifest_path(data_dir: str) -> Path:
    return Path(data_dir) / "manifest.json"


def _write_manifest(data_dir: Path, seed: int, catalog: Catalog) -> None:
    tables = []
    for name, table in sorted(catalog.tables.items()):
        tables.append(
            {
                "name": name,
                "csv": f"{name}.csv",
                "columns": [
                    {"name": c.name, "type": c.type.value, "pk": c.is_primary_key}
                    for c in table.columns
                ],
            }
        )
    (data_dir / "manifest.json").write_text(json.dumps({"seed": seed, "tables": tables}, indent=2))


def _load_data_dir(data_dir: str) -> Catalog:
    manifest = json.loads(_manifest_path(data_dir).read_text())
    catalog = Catalog()
    for entry in manifest["tables"]:
        schema = [
            ColumnMeta(c["name"], ColumnType(c["type"]), is_primary_key=c["pk"])
            for c in entry["columns"]
        ]
        catalog.load_csv(str(Path(data_dir) / entry["csv"]), entry["name"], schema)
    return catalog


def _catalog_for(args) -> tuple[Catalog, list, int]:
    """Shared setup: either a CSV directory or the built-in generated suite."""
    seed = _seed_from(args)
    if getattr(args, "data", None):
        catalog = _load_data_dir(args.data)
        workload = []
        return catalog, workload, seed
    catalog, workload = build_corpus(seed=seed, scale=getattr(args, "scale", 1.0))
    return catalog, workload, seed


def _estimator(bench: Bench, name: str, query_size: int) -> Estimator:
    return BenchConfig(name="cli", estimator=name).estimator_for(bench, query_size)


def _statements(text: str) -> list[str]:
    """Split on semicolons outside string literals."""
    out, buf, in_str = [], [], False
    for ch in text:
        if ch == "'":
            in_str = not in_str
        if ch == ";" and not in_str:
            stmt = "".join(buf).strip()
            if stmt:
                out.append(stmt)
            buf = []
        else:
            buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        out.append(tail)
    return out


def _precompute_oracle(bench: Bench, workload, n: int, jobs: int) -> int:
    """Warm the oracle memo for all connected subsets up to size n."""
    requests = []
    for _, spec in workload:
        graph = join_graph(spec)
        aliases = sorted(a for _, a in spec.relations)
        for size in range(1, min(n, len(aliases)) + 1):
            for combo in combinations(aliases, size):
                if graph.is_connected(frozenset(combo)):
                    requests.append(request_for(spec, combo))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(bench.oracle.true_cardinality, requests))
    else:
        for req in requests:
            bench.oracle.true_cardinality(req)
    return len(requests)


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_generate(args) -> int:
    seed = _seed_from(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    catalog = Catalog()
    if args.kind == "suite":
        for spec in corpus_specs(seed, scale=args.scale):
            generate(spec, catalog)
    else:
        sizes = json.loads(args.sizes) if args.sizes else {}
        generate(
            GeneratorSpec(args.kind, sizes, zipf_s=args.zipf_s, correlation_rho=args.rho, seed=seed),
            catalog,
        )
    for name, table in sorted(catalog.tables.items()):
        write_csv(str(out_dir / f"{name}.csv"), table)
    _write_manifest(out_dir, seed, catalog)
    print(f"seed={seed}")
    print(f"wrote {len(catalog.tables)} tables to {out_dir}")
    return 0


def _cmd_load(args) -> int:
    catalog = _load_data_dir(args.data)
    for name, table in sorted(catalog.tables.items()):
        print(f"{name}: {table.row_count} rows, {len(table.columns)} columns")
    return 0


def _cmd_analyze(args) -> int:
    catalog, _, seed = _catalog_for(args)
    stats = analyze_catalog(
        catalog,
        bucket_count=args.buckets,
        mcv_capacity=args.mcvs,
        sample_fraction=args.sample_fraction,
        seed=seed,
    )
    text = stats_to_json(stats)
    if args.out:
        Path(args.out).write_text(text)
        print(f"seed={seed}")
        print(f"wrote statistics for {len(stats)} tables to {args.out}")
    else:
        print(text)
    return 0


def _read_query(args) -> str:
    if args.query:
        return args.query
    if args.sql:
        return Path(args.sql).read_text()
    raise _UsageError("one of --query or --sql is required")


def _cmd_run(args) -> int:
    catalog, workload, seed = _catalog_for(args)
    if not getattr(args, "data", None):
        print(f"-- seed={seed}")
    stats = analyze_catalog(catalog)
    bench = Bench(catalog, stats)
    statements = _statements(_read_query(args))
    estimator = _estimator(bench, args.estimator, 32)

    if args.improve:
        qid = "query"
        spec = parse(statements[-1], catalog)
        curve = selective_improvement(spec, args.threshold, estimator)
        perfect = _estimator(bench, "perfect:max", len(spec.relations))
        plan_p, _ = optimize(spec, perfect)
        perfect_us = execute(plan_p, catalog).execution_time_us
        csv_text = improvement_to_csv({qid: curve}, {qid: perfect_us})
        if args.out:
            Path(args.out).write_text(csv_text)
            print(f"wrote improvement curve to {args.out}")
        else:
            print(csv_text)
        return 0

    for statement in statements:
        spec = parse(statement, catalog)
        if isinstance(spec, CreateTempSpec):
            plan, _ = optimize(spec.select, estimator)
            exported = {
                (p.col.alias, p.col.column): p.col.column for p in spec.select.projections
            }
            table, result = execute_to_temp(plan, spec.name, exported, catalog)
            estimator.stats[spec.name] = analyze_temp(table)
            print(f"-- CREATE TEMP TABLE {spec.name}: {table.row_count} rows "
                  f"({result.execution_time_us} us)")
            continue
        if args.reopt:
            config = ReoptConfig(
                threshold=args.threshold,
                strict_paper_sim=args.strict_paper_sim,
                analyze_temps=not args.no_temp_analyze,
                min_base_latency_us=args.min_base_latency_us,
            )
            result, trace = run_with_reopt(spec, estimator, config)
            print(trace.final_plan)
            print(f"-- rounds={len(trace.rounds)} planning_us={trace.total_planning_us} "
                  f"execution_us={trace.total_execution_us} rows={len(result.rows)}")
            if args.out:
                Path(args.out).write_text(trace.to_json())
                print(f"-- trace written to {args.out}")
        else:
            plan, planning_us = optimize(spec, estimator)
            result = execute(plan, catalog)
            print(explain_analyze(plan, result))
            print(f"-- planning_us={planning_us} execution_us={result.execution_time_us} "
                  f"rows={len(result.rows)}")
    return 0


def _cmd_explain(args) -> int:
    catalog, _, seed = _catalog_for(args)
    if not getattr(args, "data", None):
        print(f"-- seed={seed}")
    stats = analyze_catalog(catalog)
    bench = Bench(catalog, stats)
    spec = parse(_statements(_read_query(args))[-1], catalog)
    if isinstance(spec, CreateTempSpec):
        spec = spec.select
    estimator = _estimator(bench, args.estimator, len(spec.relations))
    shape = "left_deep" if args.left_deep else "bushy"
    plan, planning_us = optimize(spec, estimator, OptimizerConfig(shape=shape))
    print(explain(plan))
    print(f"-- planning_us={planning_us}")
    return 0


def _workload_for(args, catalog, workload):
    if workload:
        return workload
    return [(qid, parse(sql, catalog)) for qid, sql in WORKLOAD_SQL]


def _cmd_bench(args) -> int:
    catalog, workload, seed = _catalog_for(args)
    stats = analyze_catalog(catalog)
    bench = Bench(catalog, stats)
    workload = _workload_for(args, catalog, workload)
    configs = []
    for name in args.configs.split(","):
        name = name.strip()
        if name == "default":
            configs.append(BenchConfig(name="default"))
        elif name.startswith("reopt"):
            threshold = float(name.partition("@")[2]) if "@" in name else 32.0
            configs.append(BenchConfig(name=name, reopt=True, threshold=threshold))
        else:
            configs.append(BenchConfig(name=name, estimator=name))
    if args.jobs > 1 or args.precompute:
        warmed = _precompute_oracle(bench, workload, args.precompute or 2, args.jobs)
        print(f"-- oracle warmup: {warmed} requests")
    report = run_bench(workload, configs, bench, seed=seed)
    print(f"seed={seed}")
    out_prefix = Path(args.out_prefix) if args.out_prefix else None
    csv_name = report_filename("bench", seed, configs, "csv")
    json_name = report_filename("bench", seed, configs, "json")
    if out_prefix:
        out_prefix.mkdir(parents=True, exist_ok=True)
        (out_prefix / csv_name).write_text(report.to_csv())
        (out_prefix / json_name).write_text(report.to_json())
        print(f"wrote {out_prefix / csv_name}")
        print(f"wrote {out_prefix / json_name}")
        if args.top_k:
            top = top_k_report(report, args.top_k)
            top_name = report_filename(f"top{args.top_k}", seed, configs, "csv")
            (out_prefix / top_name).write_text(top.to_csv())
            print(f"wrote {out_prefix / top_name}")
    else:
        print(report.to_json())
    return 0


def _cmd_sweep(args) -> int:
    catalog, workload, seed = _catalog_for(args)
    stats = analyze_catalog(catalog)
    workload = _workload_for(args, catalog, workload)
    estimator = Estimator(catalog, stats)
    thresholds = [math.inf if t.strip() in ("inf", "max") else float(t) for t in args.thresholds.split(",")]
    rows = threshold_sweep(workload, thresholds, estimator)
    text = sweep_to_csv(rows)
    print(f"seed={seed}")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_ladder(args) -> int:
    catalog, workload, seed = _catalog_for(args)
    stats = analyze_catalog(catalog)
    bench = Bench(catalog, stats)
    workload = _workload_for(args, catalog, workload)
    n_values = [v.strip() if v.strip() == "max" else int(v) for v in args.n.split(",")]
    if args.jobs > 1:
        sizes = [n for n in n_values if isinstance(n, int)]
        warmed = _precompute_oracle(bench, workload, max(sizes, default=2), args.jobs)
        print(f"-- oracle warmup: {warmed} requests")
    rows = perfect_ladder(workload, n_values, bench)
    text = ladder_to_csv(rows)
    print(f"seed={seed}")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="reopt-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--seed", type=int, default=None, help="PRNG seed (env REOPT_LAB_SEED)")
        p.add_argument("--config", default=None, help="JSON file supplying flag defaults")
        if data:
            p.add_argument("--data", default=None, help="directory with manifest.json + CSVs")
            p.add_argument("--scale", type=float, default=1.0, help="built-in suite size multiplier")

    p = sub.add_parser("generate", help="write a synthetic dataset as CSVs")
    common(p, data=False)
    p.add_argument("--kind", required=True, choices=["stocks", "employees", "chain", "star", "suite"])
    p.add_argument("--out", required=True)
    p.add_argument("--sizes", default=None, help="JSON object of per-table row counts")
    p.add_argument("--zipf-s", type=float, default=1.1)
    p.add_argument("--rho", type=float, default=0.0, help="rank correlation for employees")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("load", help="load a CSV directory and print table summaries")
    common(p, data=False)
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("analyze", help="collect statistics and dump them as JSON")
    common(p)
    p.add_argument("--buckets", type=int, default=100)
    p.add_argument("--mcvs", type=int, default=100)
    p.add_argument("--sample-fraction", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("run", help="execute a query, optionally with re-optimization")
    common(p)
    p.add_argument("--sql", default=None, help="file with one or more ;-separated statements")
    p.add_argument("--query", default=None, help="inline SQL text")
    p.add_argument("--estimator", default="default", help="default | perfect:N | perfect:max")
    p.add_argument("--reopt", action="store_true")
    p.add_argument("--threshold", type=float, default=32.0)
    p.add_argument("--strict-paper-sim", action="store_true",
                   help="re-execute temp-table queries from scratch")
    p.add_argument("--no-temp-analyze", action="store_true",
                   help="skip statistics collection on materialized temps")
    p.add_argument("--min-base-latency-us", type=int, default=0)
    p.add_argument("--improve", action="store_true",
                   help="run the iterative estimate-correction loop instead")
    p.add_argument("--out", default=None, help="trace JSON / improvement CSV path")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("explain", help="optimize a query and print the plan")
    common(p)
    p.add_argument("--sql", default=None)
    p.add_argument("--query", default=None)
    p.add_argument("--estimator", default="default")
    p.add_argument("--left-deep", action="store_true")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("bench", help="run the workload under multiple configs")
    common(p)
    p.add_argument("--configs", default="default,perfect:max,reopt@32")
    p.add_argument("--out-prefix", default=None, help="directory for CSV/JSON reports")
    p.add_argument("--top-k", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="threads for oracle precompute")
    p.add_argument("--precompute", type=int, default=0, help="warm oracle up to this join size")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("sweep", help="re-optimization threshold sweep")
    common(p)
    p.add_argument("--thresholds", default="2,4,8,16,32,64")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ladder", help="perfect-(n) ladder totals")
    common(p)
    p.add_argument("--n", default="0,1,2,3,4,max")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_ladder)
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    overrides = json.loads(Path(args.config).read_text())
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise _UsageError(f"unknown config key {key!r}")
        # command line wins: only fill values the user left at the default
        parser_default = _DEFAULTS.get((args.command, attr), None)
        if getattr(args, attr) == parser_default:
            setattr(args, attr, value)


_DEFAULTS: dict = {}


def _collect_defaults(parser: _Parser) -> None:
    for action in parser._subparsers._group_actions[0].choices.items():  # type: ignore[union-attr]
        command, sub = action
        for a in sub._actions:
            if a.dest not in ("help", "command"):
                _DEFAULTS[(command, a.dest)] = a.default


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    _collect_defaults(parser)
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
