"""Benchmark harness: run the workload under multiple estimator/reopt
configurations and produce report tables (per-query rows, totals,
relative-runtime distributions, perfect-(n) ladders, top-k slices).

Reports carry both accountings: execution time alone (cached-plan view)
and planning plus execution.
"""
from __future__ import annotations

import hashlib
import json
import math
import statistics
from dataclasses import dataclass, field

from .cardinality import CardinalityOracle, Estimator, EstimatorConfig
from .errors import EngineError
from .executor import execute
from .optimizer import OptimizerConfig, optimize
from .reopt import ReoptConfig, run_with_reopt
from .sql import QuerySpec
from .stats import TableStats
from .storage import Catalog

BUCKETS = ((0.1, 0.8), (0.8, 1.2), (1.2, 2.0), (2.0, 5.0), (5.0, math.inf))


@dataclass(frozen=True)
class BenchConfig:
    name: str
    estimator: str = "default"  # "default" | "perfect:<n>" | "perfect:max"
    reopt: bool = False
    threshold: float = 32.0

    def estimator_for(self, bench: "Bench", query_size: int) -> Estimator:
        if self.estimator == "default":
            return Estimator(bench.catalog, bench.stats)
        _, _, arg = self.estimator.partition(":")
        n = query_size if arg == "max" else int(arg)
        return Estimator(
            bench.catalog,
            bench.stats,
            EstimatorConfig(mode="perfect", perfect_n=n),
            oracle=bench.oracle,
        )


@dataclass
class QueryRun:
    query_id: str
    config: str
    planning_us: int
    execution_us: int
    reopt_rounds: int
    output_rows: int
    error: str | None = None


@dataclass
class BenchReport:
    seed: int
    baseline: str
    rows: list[QueryRun] = field(default_factory=list)
    clipped: list[str] = field(default_factory=list)  # queries below the lowest bucket

    def runs_for(self, config: str) -> dict[str, QueryRun]:
        return {r.query_id: r for r in self.rows if r.config == config}

    def totals(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for row in self.rows:
            entry = out.setdefault(row.config, {"planning_us": 0, "execution_us": 0})
            entry["planning_us"] += row.planning_us
            entry["execution_us"] += row.execution_us
        return out

    def relative_runtime_buckets(self) -> dict[str, dict[str, int]]:
        """Per-config histogram of execution time relative to the baseline
        config, using the paper-style bucket boundaries. Ratios below the
        lowest bucket are clipped into it and flagged."""
        base = self.runs_for(self.baseline)
        out: dict[str, dict[str, int]] = {}
        clipped: list[str] = []
        for config in sorted({r.config for r in self.rows}):
            counts = {self._bucket_label(lo, hi): 0 for lo, hi in BUCKETS}
            for qid, run in sorted(self.runs_for(config).items()):
                baseline_run = base.get(qid)
                if baseline_run is None or run.error or baseline_run.error:
                    continue
                rel = run.execution_us / max(baseline_run.execution_us, 1)
                if rel < BUCKETS[0][0]:
                    clipped.append(f"{config}:{qid}")
                    rel = BUCKETS[0][0]
                for lo, hi in BUCKETS:
                    if lo <= rel < hi:
                        counts[self._bucket_label(lo, hi)] += 1
                        break
            out[config] = counts
        self.clipped = clipped
        return out

    @staticmethod
    def _bucket_label(lo: float, hi: float) -> str:
        return f">{lo:g}" if math.isinf(hi) else f"{lo:g}-{hi:g}"

    def to_csv(self) -> str:
        lines = ["query_id,config,planning_us,execution_us,reopt_rounds,output_rows,error"]
        for r in self.rows:
            error = (r.error or "").replace(",", ";").replace("\n", " ")
            lines.append(
                f"{r.query_id},{r.config},{r.planning_us},{r.execution_us},"
                f"{r.reopt_rounds},{r.output_rows},{error}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "baseline": self.baseline,
                "totals": self.totals(),
                "buckets": self.relative_runtime_buckets(),
                "clipped": self.clipped,
                "queries": sorted({r.query_id for r in self.rows}),
            },
            indent=2,
        )


class Bench:
    """Shared state for one benchmark session: catalog, statistics, and the
    memoized cardinality oracle."""

    def __init__(self, catalog: Catalog, stats: dict[str, TableStats], opt_config: OptimizerConfig = OptimizerConfig()):
        self.catalog = catalog
        self.stats = stats
        self.opt_config = opt_config
        self.oracle = CardinalityOracle(catalog, stats)

    def run_query(self, spec: QuerySpec, config: BenchConfig) -> tuple[int, int, int, int]:
        """One query under one config: (planning_us, execution_us, rounds, rows)."""
        estimator = config.estimator_for(self, len(spec.relations))
        if config.reopt:
            result, trace = run_with_reopt(
                spec, estimator, ReoptConfig(threshold=config.threshold), self.opt_config
            )
            return trace.total_planning_us, trace.total_execution_us, len(trace.rounds), len(result.rows)
        plan, planning_us = optimize(spec, estimator, self.opt_config)
        result = execute(plan, self.catalog)
        return planning_us, result.execution_time_us, 0, len(result.rows)


def run_bench(
    workload: list[tuple[str, QuerySpec]],
    configs: list[BenchConfig],
    bench: Bench,
    seed: int = 0,
    baseline: str | None = None,
) -> BenchReport:
    """Each query under each config; per-query failures are recorded
    without aborting the suite. Configs run back to back per query so
    cross-config comparisons share the host's timing conditions."""
    names = [c.name for c in configs]
    if baseline is None:
        baseline = next((c.name for c in configs if c.estimator.startswith("perfect")), names[0])
    if baseline not in names:
        raise ValueError(f"baseline config {baseline!r} not among {names}")
    report = BenchReport(seed=seed, baseline=baseline)
    rows_by_config: dict[str, list[QueryRun]] = {c.name: [] for c in configs}
    for qid, spec in workload:
        for config in configs:
            try:
                planning, execution, rounds, nrows = bench.run_query(spec, config)
                rows_by_config[config.name].append(
                    QueryRun(qid, config.name, planning, execution, rounds, nrows)
                )
            except EngineError as exc:
                rows_by_config[config.name].append(QueryRun(qid, config.name, 0, 0, 0, 0, error=str(exc)))
    for config in configs:
        report.rows.extend(rows_by_config[config.name])
    return report


def run_bench_repeated(
    workload: list[tuple[str, QuerySpec]],
    configs: list[BenchConfig],
    bench: Bench,
    repetitions: int = 3,
    seed: int = 0,
    baseline: str | None = None,
) -> BenchReport:
    """Median planning/execution per query over timed repetitions."""
    reports = [run_bench(workload, configs, bench, seed, baseline) for _ in range(repetitions)]
    merged = BenchReport(seed=seed, baseline=reports[0].baseline)
    for i, row in enumerate(reports[0].rows):
        samples = [rep.rows[i] for rep in reports]
        merged.rows.append(
            QueryRun(
                row.query_id,
                row.config,
                int(statistics.median(s.planning_us for s in samples)),
                int(statistics.median(s.execution_us for s in samples)),
                row.reopt_rounds,
                row.output_rows,
                row.error,
            )
        )
    return merged


def perfect_ladder(
    workload: list[tuple[str, QuerySpec]],
    n_values: list[int | str],
    bench: Bench,
) -> list[dict]:
    """Workload totals per perfect-(n); 'max' means every request answered
    by the oracle."""
    out = []
    for n in n_values:
        config = BenchConfig(name=f"perfect-{n}", estimator=f"perfect:{n}")
        if n == 0:
            config = BenchConfig(name="perfect-0", estimator="default")
        planning = execution = 0
        for _, spec in workload:
            p, e, _, _ = bench.run_query(spec, config)
            planning += p
            execution += e
        out.append({"n": n, "planning_us": planning, "execution_us": execution})
    return out


def ladder_to_csv(rows: list[dict]) -> str:
    lines = ["n,planning_us,execution_us"]
    for r in rows:
        lines.append(f"{r['n']},{r['planning_us']},{r['execution_us']}")
    return "\n".join(lines) + "\n"


def top_k_report(report: BenchReport, k: int, default_config: str = "default") -> BenchReport:
    """Rows for the k longest-running queries under the default config
    (descending), keeping every config's rows for those queries."""
    default_runs = report.runs_for(default_config)
    if k > len(default_runs):
        raise ValueError(f"k={k} exceeds query count {len(default_runs)}")
    ranked = sorted(default_runs.values(), key=lambda r: -r.execution_us)
    keep = [r.query_id for r in ranked[:k]]
    keep_set = set(keep)
    sub = BenchReport(seed=report.seed, baseline=report.baseline)
    order = {qid: i for i, qid in enumerate(keep)}
    sub.rows = sorted(
        (r for r in report.rows if r.query_id in keep_set),
        key=lambda r: (order[r.query_id], r.config),
    )
    return sub


def config_hash(configs: list[BenchConfig]) -> str:
    digest = hashlib.blake2b(repr(configs).encode(), digest_size=4)
    return digest.hexdigest()


def report_filename(kind: str, seed: int, configs: list[BenchConfig], ext: str) -> str:
    return f"{kind}_seed{seed}_{config_hash(configs)}.{ext}"
