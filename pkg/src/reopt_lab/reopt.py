"""Mid-query re-optimization and the iterative estimate-correction loop.

The driver runs a query, scans executed join operators bottom-up for one
whose Q-error crosses the threshold, materializes that subtree as a temp
table with fresh exact statistics, substitutes the temp table into the
residual query, re-plans, and repeats. Accounting follows the temporary
table protocol: planning sums the original plus each re-planned SELECT;
execution sums each temp-table creation plus the final SELECT.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .cardinality import Estimator, request_for
from .executor import ExecResult, execute, execute_to_temp, project_rows, temp_schema
from .optimizer import OptimizerConfig, PlanNode, explain, optimize, plan_nodes, subtree_sizes
from .sql import ColRef, ProjItem, QuerySpec, render, substitute
from .stats import ColumnStats, Histogram, McvList, TableStats, analyze_temp
from .storage import Catalog


class NonTermination(RuntimeError):
    """Defensive guard: the correction loop failed to converge."""


def qerror(est: float, act: float) -> float:
    """Symmetric ratio >= 1; inputs clamped to >= 1 so empty results and
    zero estimates stay finite."""
    e = max(float(est), 1.0)
    a = max(float(act), 1.0)
    return max(e / a, a / e)


@dataclass(frozen=True)
class ReoptConfig:
    threshold: float = 32.0  # trigger when qerror >= threshold (inclusive)
    max_rounds: int = 16
    min_base_latency_us: int = 0  # 0 disables the short-query gate
    strict_paper_sim: bool = False  # re-execute temp-table queries from scratch
    analyze_temps: bool = True
    temp_prefix: str = "temp"


@dataclass(frozen=True)
class ReoptRound:
    node_op: str
    node_rels: tuple[str, ...]
    est_rows: float
    actual_rows: int
    qerror: float
    temp_name: str
    temp_rows: int
    creation_us: int
    replanned_sql: str


@dataclass
class ReoptTrace:
    rounds: list[ReoptRound] = field(default_factory=list)
    total_planning_us: int = 0
    total_execution_us: int = 0
    max_rounds_exceeded: bool = False
    gated: bool = False
    final_plan: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "rounds": [
                    {
                        "op": r.node_op,
                        "rels": list(r.node_rels),
                        "est_rows": r.est_rows,
                        "actual_rows": r.actual_rows,
                        "qerror": r.qerror,
                        "temp_name": r.temp_name,
                        "temp_rows": r.temp_rows,
                        "creation_us": r.creation_us,
                        "replanned_sql": r.replanned_sql,
                    }
                    for r in self.rounds
                ],
                "total_planning_us": self.total_planning_us,
                "total_execution_us": self.total_execution_us,
                "max_rounds_exceeded": self.max_rounds_exceeded,
                "gated": self.gated,
            },
            indent=2,
        )


@dataclass(frozen=True)
class _Violation:
    node_id: int
    node: PlanNode
    actual_rows: int
    qerror: float
    subtree_elapsed_us: int


def find_violating_join(plan: PlanNode, result: ExecResult, threshold: float) -> _Violation | None:
    """Lowest executed join with qerror >= threshold; ties toward the
    leftmost (smallest postorder index)."""
    nodes = plan_nodes(plan)
    sizes = subtree_sizes(plan)
    heights = _heights(nodes)
    profiles = result.profiles_by_id
    best: tuple[int, int] | None = None
    chosen: _Violation | None = None
    for i, node in enumerate(nodes):
        if not node.is_join():
            continue
        prof = profiles[i]
        q = qerror(node.est_rows, prof.actual_rows)
        if q < threshold:
            continue
        rank = (heights[i], i)
        if best is None or rank < best:
            best = rank
            span = range(i - sizes[i] + 1, i + 1)
            elapsed = sum(profiles[j].elapsed_us for j in span)
            chosen = _Violation(i, node, prof.actual_rows, q, elapsed)
    return chosen


def _heights(nodes: list[PlanNode]) -> list[int]:
    # postorder: children precede parents, so one pass suffices
    by_id: dict[int, int] = {}
    heights = []
    for i, node in enumerate(nodes):
        h = 1 + max((by_id[id(c)] for c in node.children), default=-1)
        by_id[id(node)] = h
        heights.append(h)
    return heights


def derive_exported_cols(spec: QuerySpec, removed: frozenset[str]) -> dict[tuple[str, str], str]:
    """All subtree columns referenced above the cut: endpoints of join
    edges crossing it plus projections over removed aliases."""
    exported: dict[tuple[str, str], str] = {}

    def export(ref: ColRef) -> None:
        key = (ref.alias, ref.column)
        exported.setdefault(key, f"{ref.alias}_{ref.column}")

    for edge in spec.join_edges:
        touched = edge.aliases() & removed
        if len(touched) != 1:
            continue
        export(edge.left if edge.left.alias in removed else edge.right)
    for proj in spec.projections:
        if proj.col.alias in removed:
            export(proj.col)
    return exported


def _next_temp_name(catalog: Catalog, prefix: str) -> str:
    i = 1
    while f"{prefix}{i}" in catalog:
        i += 1
    return f"{prefix}{i}"


def _subquery_spec(spec: QuerySpec, removed: frozenset[str], exported) -> QuerySpec:
    """The CREATE TEMP TABLE ... AS SELECT body for a materialized subtree."""
    return QuerySpec(
        relations=tuple((t, a) for t, a in spec.relations if a in removed),
        filters=tuple(p for p in spec.filters if p.col.alias in removed),
        join_edges=tuple(e for e in spec.join_edges if e.aliases() <= removed),
        projections=tuple(ProjItem(ColRef(a, c)) for (a, c) in exported),
    )


def run_with_reopt(
    spec: QuerySpec,
    estimator: Estimator,
    config: ReoptConfig,
    opt_config: OptimizerConfig = OptimizerConfig(),
) -> tuple[ExecResult, ReoptTrace]:
    """Adaptive execution loop; returns the final result and the trace.

    The materialized temp table reuses the already-computed subtree rows;
    its creation time is the observed subtree time. With strict_paper_sim
    the temp-table query is planned (unaccounted) and executed from
    scratch instead, mirroring an external simulation.
    """
    catalog = estimator.catalog
    trace = ReoptTrace()
    current = spec
    created_temps: list[str] = []
    try:
        while True:
            plan, planning_us = optimize(current, estimator, opt_config)
            trace.total_planning_us += planning_us
            result = execute(plan, catalog, keep_outputs=not config.strict_paper_sim)
            violation = find_violating_join(plan, result, config.threshold)
            if not trace.rounds and config.min_base_latency_us > 0:
                if result.execution_time_us < config.min_base_latency_us:
                    trace.gated = True
                    violation = None
            if violation is not None and len(trace.rounds) >= config.max_rounds:
                trace.max_rounds_exceeded = True
                violation = None
            if violation is None:
                trace.total_execution_us += result.execution_time_us
                trace.final_plan = explain(plan)
                result.node_outputs = {}
                return result, trace

            removed = frozenset(violation.node.rels)
            exported = derive_exported_cols(current, removed)
            temp_name = _next_temp_name(catalog, config.temp_prefix)
            if config.strict_paper_sim:
                sub_spec = _subquery_spec(current, removed, exported)
                # planning of temp-table creation is already covered by the
                # original query's planning time, so it is not accounted
                sub_plan, _ = optimize(sub_spec, estimator, opt_config)
                temp_table, sub_result = execute_to_temp(sub_plan, temp_name, exported, catalog)
                creation_us = sub_result.execution_time_us
            else:
                rows, layout = result.node_outputs[violation.node_id]
                temp_rows, _ = project_rows(rows, layout, exported)
                schema = temp_schema(plan, catalog, exported)
                temp_table = catalog.create_temp_table(temp_name, schema, temp_rows)
                creation_us = violation.subtree_elapsed_us
            created_temps.append(temp_name)
            if config.analyze_temps:
                estimator.stats[temp_name] = analyze_temp(temp_table)
            else:
                # row count is known from the write; columns stay unknown
                estimator.stats[temp_name] = TableStats(
                    temp_table.row_count,
                    {c.name: _distinct_guess(temp_table.row_count) for c in temp_table.columns},
                    exact=False,
                )
            trace.total_execution_us += creation_us
            current = substitute(current, removed, temp_name, exported)
            trace.rounds.append(
                ReoptRound(
                    node_op=violation.node.op,
                    node_rels=tuple(sorted(violation.node.rels)),
                    est_rows=violation.node.est_rows,
                    actual_rows=violation.actual_rows,
                    qerror=violation.qerror,
                    temp_name=temp_name,
                    temp_rows=temp_table.row_count,
                    creation_us=creation_us,
                    replanned_sql=render(current),
                )
            )
    finally:
        for name in created_temps:
            if name in catalog.tables:
                del catalog.tables[name]
            estimator.stats.pop(name, None)


def _distinct_guess(row_count: int) -> ColumnStats:
    return ColumnStats(row_count, None, None, 0.0, McvList((), 0), Histogram((), 0.0))


# ---------------------------------------------------------------------------
# Threshold sweep

def threshold_sweep(
    workload: list[tuple[str, QuerySpec]],
    thresholds: list[float],
    estimator: Estimator,
    opt_config: OptimizerConfig = OptimizerConfig(),
    reopt_config: ReoptConfig = ReoptConfig(),
) -> list[dict]:
    """Whole-workload planning/execution totals per threshold.

    Thresholds are interleaved per query (all thresholds back to back on
    one query before moving on) so that per-threshold totals compare
    measurements taken close together in time."""
    for threshold in thresholds:
        if not threshold > 1:
            raise ValueError("thresholds must be > 1")
    totals = {
        t: {"threshold": t, "planning_us": 0, "execution_us": 0, "reopt_rounds": 0}
        for t in thresholds
    }
    for _, spec in workload:
        for threshold in thresholds:
            cfg = replace(reopt_config, threshold=threshold)
            _, trace = run_with_reopt(spec, estimator, cfg, opt_config)
            totals[threshold]["planning_us"] += trace.total_planning_us
            totals[threshold]["execution_us"] += trace.total_execution_us
            totals[threshold]["reopt_rounds"] += len(trace.rounds)
    return [totals[t] for t in thresholds]


def sweep_to_csv(rows: list[dict]) -> str:
    lines = ["threshold,planning_us,execution_us,reopt_rounds"]
    for r in rows:
        t = "inf" if math.isinf(r["threshold"]) else f"{r['threshold']:g}"
        lines.append(f"{t},{r['planning_us']},{r['execution_us']},{r['reopt_rounds']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Iterative estimate correction (no materialization)

@dataclass
class ImprovementCurve:
    iterations: list[tuple[int, int, str | None]] = field(default_factory=list)
    # (iteration, execution_us, corrected request key applied after it)

    @property
    def execution_times(self) -> list[int]:
        return [t for _, t, _ in self.iterations]


def selective_improvement(
    spec: QuerySpec,
    threshold: float,
    estimator: Estimator,
    opt_config: OptimizerConfig = OptimizerConfig(),
    max_iterations: int = 64,
) -> ImprovementCurve:
    """Repeatedly execute, then pin the lowest mis-estimated operator's
    request and every request below it to their true values, until no
    operator's error reaches the threshold."""
    from .cardinality import EstimatorConfig

    catalog = estimator.catalog
    overrides: dict = {}
    corrected = Estimator(
        catalog,
        estimator.stats,
        EstimatorConfig(
            mode="overrides",
            default_like_selectivity=estimator.config.default_like_selectivity,
        ),
        overrides=overrides,
        count_estimates=False,
    )
    curve = ImprovementCurve()
    for iteration in range(max_iterations):
        plan, _ = optimize(spec, corrected, opt_config)
        result = execute(plan, catalog)
        nodes = plan_nodes(plan)
        sizes = subtree_sizes(plan)
        heights = _heights(nodes)
        profiles = result.profiles_by_id
        violation = None
        best = None
        for i, node in enumerate(nodes):
            if not (node.is_join() or node.op in ("SeqScan", "TempScan")):
                continue
            q = qerror(node.est_rows, profiles[i].actual_rows)
            if q < threshold:
                continue
            rank = (heights[i], i)
            if best is None or rank < best:
                best = rank
                violation = i
        if violation is None:
            curve.iterations.append((iteration, result.execution_time_us, None))
            return curve
        before = len(overrides)
        span = range(violation - sizes[violation] + 1, violation + 1)
        for j in span:
            node = nodes[j]
            if node.is_join() or node.op in ("SeqScan", "TempScan"):
                overrides[request_for(spec, node.rels)] = float(profiles[j].actual_rows)
        if len(overrides) == before:
            raise NonTermination("correction loop made no progress")
        corrected_key = request_for(spec, nodes[violation].rels).key()
        curve.iterations.append((iteration, result.execution_time_us, corrected_key))
    raise NonTermination(f"no convergence after {max_iterations} iterations")


def improvement_to_csv(curves: dict[str, ImprovementCurve], perfect_us: dict[str, int]) -> str:
    lines = ["query_id,iteration,execution_us,perfect_us"]
    for qid, curve in curves.items():
        for iteration, exec_us, _ in curve.iterations:
            lines.append(f"{qid},{iteration},{exec_us},{perfect_us[qid]}")
    return "\n".join(lines) + "\n"
