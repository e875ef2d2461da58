"""Execute plan trees over the catalog, recording per-operator actual row
counts and wall-clock timings.

Operators are fully materializing: each produces its whole output before
the parent consumes it, which makes timing attribution exact and makes
the cost of a broken pipeline (the price of re-optimization) explicit.
Per-operator elapsed time excludes children; the sum over all operators
is bounded by the total execution time.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import MissingTable, TypeMismatch
from .optimizer import (
    AGGREGATE_MIN,
    HASH_JOIN,
    INDEX_NL_JOIN,
    NL_JOIN,
    PROJECT,
    SCAN_OPS,
    PlanNode,
    describe_node,
    plan_nodes,
)
from .sql import Eq, Filter, Gt, In, JoinEq, Lt, like_regex
from .storage import Catalog, ColumnMeta, Row, Table, Value

Layout = tuple[tuple[str, str], ...]  # (alias, column) per output position


@dataclass(frozen=True)
class OperatorProfile:
    node_id: int  # postorder index into plan_nodes(plan)
    op: str
    est_rows: float
    actual_rows: int
    elapsed_us: int  # own work, children excluded


@dataclass
class ExecResult:
    rows: list[Row]
    layout: Layout
    profiles: list[OperatorProfile]
    execution_time_us: int
    node_outputs: dict[int, tuple[list[Row], Layout]] = field(default_factory=dict)

    @property
    def profiles_by_id(self) -> dict[int, OperatorProfile]:
        return {p.node_id: p for p in self.profiles}


def _now_us() -> int:
    return time.perf_counter_ns() // 1000


def _compile_filter(pred: Filter, idx: int):
    if isinstance(pred, Eq):
        v = pred.value
        return lambda row: row[idx] == v
    if isinstance(pred, Lt):
        v = pred.value
        return lambda row: row[idx] is not None and row[idx] < v
    if isinstance(pred, Gt):
        v = pred.value
        return lambda row: row[idx] is not None and row[idx] > v
    if isinstance(pred, In):
        vs = set(pred.values)
        return lambda row: row[idx] in vs
    rx = like_regex(pred.pattern)
    return lambda row: row[idx] is not None and rx.match(row[idx]) is not None


def _key_positions(edges: tuple[JoinEq, ...], left: Layout, right: Layout) -> tuple[list[int], list[int]]:
    """Per edge, the column position of its endpoint on each side."""
    lpos, rpos = [], []
    lindex = {c: i for i, c in enumerate(left)}
    rindex = {c: i for i, c in enumerate(right)}
    for edge in edges:
        lcol = (edge.left.alias, edge.left.column)
        rcol = (edge.right.alias, edge.right.column)
        if lcol in lindex and rcol in rindex:
            lpos.append(lindex[lcol])
            rpos.append(rindex[rcol])
        elif rcol in lindex and lcol in rindex:
            lpos.append(lindex[rcol])
            rpos.append(rindex[lcol])
        else:
            raise TypeMismatch(f"join edge {edge} does not span the two inputs")
    return lpos, rpos


class _Executor:
    def __init__(self, catalog: Catalog, keep_outputs: bool):
        self.catalog = catalog
        self.keep_outputs = keep_outputs
        self.profiles: list[OperatorProfile] = []
        self.outputs: dict[int, tuple[list[Row], Layout]] = {}
        self.next_id = 0

    def run(self, node: PlanNode) -> tuple[list[Row], Layout]:
        inputs = [self.run(child) for child in node.children]
        started = _now_us()
        rows, layout = self._apply(node, inputs)
        elapsed = _now_us() - started
        node_id = self.next_id
        self.next_id += 1
        self.profiles.append(
            OperatorProfile(node_id, node.op, node.est_rows, len(rows), elapsed)
        )
        if self.keep_outputs:
            self.outputs[node_id] = (rows, layout)
        return rows, layout

    def _apply(self, node: PlanNode, inputs) -> tuple[list[Row], Layout]:
        if node.op in SCAN_OPS:
            return self._scan(node)
        if node.op == HASH_JOIN:
            return self._hash_join(node, *inputs)
        if node.op == NL_JOIN:
            return self._nl_join(node, *inputs)
        if node.op == INDEX_NL_JOIN:
            return self._index_nl_join(node, *inputs)
        if node.op == PROJECT:
            return self._project(node, *inputs)
        if node.op == AGGREGATE_MIN:
            return self._aggregate_min(node, *inputs)
        raise TypeMismatch(f"unknown operator {node.op}")

    def _scan(self, node: PlanNode) -> tuple[list[Row], Layout]:
        if node.table not in self.catalog:
            raise MissingTable(f"no table named {node.table!r}")
        table = self.catalog.get(node.table)
        layout = tuple((node.alias, c.name) for c in table.columns)
        if not node.filters:
            return list(table.rows), layout
        checks = [_compile_filter(p, table.column_index(p.col.column)) for p in node.filters]
        rows = [row for row in table.rows if all(c(row) for c in checks)]
        return rows, layout

    def _hash_join(self, node, build_in, probe_in) -> tuple[list[Row], Layout]:
        build_rows, build_layout = build_in
        probe_rows, probe_layout = probe_in
        bpos, ppos = _key_positions(node.edges, build_layout, probe_layout)
        table: dict[tuple, list[Row]] = {}
        for row in build_rows:
            key = tuple(row[i] for i in bpos)
            if None in key:
                continue  # null keys never match
            table.setdefault(key, []).append(row)
        out: list[Row] = []
        for row in probe_rows:
            key = tuple(row[i] for i in ppos)
            if None in key:
                continue
            for match in table.get(key, ()):
                out.append(match + row)
        return out, build_layout + probe_layout

    def _nl_join(self, node, outer_in, inner_in) -> tuple[list[Row], Layout]:
        outer_rows, outer_layout = outer_in
        inner_rows, inner_layout = inner_in
        out: list[Row] = []
        if not node.edges:  # Cartesian product
            for orow in outer_rows:
                for irow in inner_rows:
                    out.append(orow + irow)
            return out, outer_layout + inner_layout
        opos, ipos = _key_positions(node.edges, outer_layout, inner_layout)
        keyed_inner = [(tuple(r[i] for i in ipos), r) for r in inner_rows]
        for orow in outer_rows:
            okey = tuple(orow[i] for i in opos)
            if None in okey:
                continue
            out.extend(orow + irow for ikey, irow in keyed_inner if ikey == okey)
        return out, outer_layout + inner_layout

    def _index_nl_join(self, node, outer_in) -> tuple[list[Row], Layout]:
        outer_rows, outer_layout = outer_in
        inner = self.catalog.get(node.inner_table)
        inner_layout = tuple((node.inner_alias, c.name) for c in inner.columns)
        edge = node.pk_edge
        outer_ref = edge.left if edge.left.alias != node.inner_alias else edge.right
        outer_idx = outer_layout.index((outer_ref.alias, outer_ref.column))
        inner_checks = [
            _compile_filter(p, inner.column_index(p.col.column)) for p in node.inner_filters
        ]
        residual = None
        if node.edges:
            residual = _key_positions(node.edges, outer_layout, inner_layout)
        out: list[Row] = []
        for orow in outer_rows:
            match = self.catalog.pk_lookup(node.inner_table, orow[outer_idx])
            if match is None:
                continue
            if inner_checks and not all(c(match) for c in inner_checks):
                continue
            if residual is not None:
                opos, ipos = residual
                okey = tuple(orow[i] for i in opos)
                if None in okey or okey != tuple(match[i] for i in ipos):
                    continue
            out.append(orow + match)
        return out, outer_layout + inner_layout

    def _project(self, node, child) -> tuple[list[Row], Layout]:
        rows, layout = child
        positions = [layout.index((p.col.alias, p.col.column)) for p in node.projections]
        out_layout = tuple((p.col.alias, p.col.column) for p in node.projections)
        return [tuple(row[i] for i in positions) for row in rows], out_layout

    def _aggregate_min(self, node, child) -> tuple[list[Row], Layout]:
        rows, layout = child
        positions = [layout.index((p.col.alias, p.col.column)) for p in node.projections]
        out_layout = tuple((p.col.alias, p.col.column) for p in node.projections)
        mins: list[Value] = []
        for i in positions:
            values = [row[i] for row in rows if row[i] is not None]
            mins.append(min(values) if values else None)
        return [tuple(mins)], out_layout


def execute(plan: PlanNode, catalog: Catalog, keep_outputs: bool = False) -> ExecResult:
    """Run a plan; bag semantics, MIN aggregate when present."""
    started = _now_us()
    ex = _Executor(catalog, keep_outputs)
    rows, layout = ex.run(plan)
    elapsed = _now_us() - started
    return ExecResult(rows, layout, ex.profiles, elapsed, ex.outputs)


def project_rows(
    rows: list[Row], layout: Layout, exported_cols: dict[tuple[str, str], str]
) -> tuple[list[Row], list[str]]:
    """Extract exported columns (in mapping order) from materialized rows."""
    positions = [layout.index(col) for col in exported_cols]
    names = list(exported_cols.values())
    return [tuple(row[i] for i in positions) for row in rows], names


def temp_schema(
    plan: PlanNode, catalog: Catalog, exported_cols: dict[tuple[str, str], str]
) -> list[ColumnMeta]:
    """Column metadata for a temp table holding the exported columns."""
    alias_tables: dict[str, str] = {}
    for node in plan_nodes(plan):
        if node.alias is not None:
            alias_tables[node.alias] = node.table
        if node.inner_alias is not None:
            alias_tables[node.inner_alias] = node.inner_table
    schema = []
    for (alias, column), out_name in exported_cols.items():
        meta = catalog.get(alias_tables[alias]).column_meta(column)
        schema.append(ColumnMeta(out_name, meta.type, is_primary_key=False))
    return schema


def execute_to_temp(
    plan: PlanNode,
    temp_name: str,
    exported_cols: dict[tuple[str, str], str],
    catalog: Catalog,
) -> tuple[Table, ExecResult]:
    """Materialize a plan's exported columns as a temp table."""
    result = execute(plan, catalog)
    rows, _ = project_rows(result.rows, result.layout, exported_cols)
    table = catalog.create_temp_table(temp_name, temp_schema(plan, catalog, exported_cols), rows)
    return table, result


# ---------------------------------------------------------------------------
# EXPLAIN ANALYZE text

def explain_analyze(plan: PlanNode, result: ExecResult) -> str:
    """Plan tree annotated with actual row counts and per-operator time."""
    profiles = result.profiles_by_id
    order = plan_nodes(plan)
    ids = {id(node): i for i, node in enumerate(order)}
    lines: list[str] = []

    def walk(node: PlanNode, depth: int) -> None:
        prof = profiles[ids[id(node)]]
        lines.append(
            "  " * depth
            + f"{describe_node(node)} rows={node.est_rows:g} cost={node.cost:g}"
            + f" actual_rows={prof.actual_rows} time_us={prof.elapsed_us}"
        )
        for child in node.children:
            walk(child, depth + 1)

    walk(plan, 0)
    return "\n".join(lines)
