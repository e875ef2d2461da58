"""Cost model and dynamic-programming join enumeration.

The DP table is keyed by connected relation subsets. Left-deep mode
restricts every join to (accumulated set, single relation); bushy mode
considers every connected split. Cartesian products are excluded unless
explicitly allowed. Every cardinality request is routed through the
estimator, which tallies requests per join size.

All enumeration orders are canonical (sorted aliases, lexicographic
subsets), so repeated calls are bit-identical and cost ties break toward
the lexicographically smallest split.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from itertools import combinations

from .cardinality import CardinalityRequest, Estimator, request_for
from .errors import DisconnectedJoinGraph
from .sql import Filter, JoinEq, ProjItem, QuerySpec, join_graph, render_predicate

SEQ_SCAN = "SeqScan"
TEMP_SCAN = "TempScan"
HASH_JOIN = "HashJoin"
NL_JOIN = "NLJoin"
INDEX_NL_JOIN = "IndexNLJoin"
PROJECT = "Project"
AGGREGATE_MIN = "AggregateMin"

JOIN_OPS = frozenset({HASH_JOIN, NL_JOIN, INDEX_NL_JOIN})
SCAN_OPS = frozenset({SEQ_SCAN, TEMP_SCAN})


@dataclass(frozen=True)
class OptimizerConfig:
    shape: str = "bushy"  # "bushy" | "left_deep"
    allow_cartesian: bool = False
    c_tuple: float = 1.0
    c_hash_build: float = 2.0
    c_hash_probe: float = 1.0
    c_index_lookup: float = 4.0


@dataclass(frozen=True)
class PlanNode:
    """Physical operator with its estimated cardinality and cumulative cost,
    both fixed at plan time."""

    op: str
    rels: frozenset[str]
    est_rows: float
    cost: float
    children: tuple["PlanNode", ...] = ()
    # scans
    table: str | None = None
    alias: str | None = None
    filters: tuple[Filter, ...] = ()
    table_rows: int = 0
    # joins; for IndexNLJoin the inner side is a base-table lookup, not a child
    edges: tuple[JoinEq, ...] = ()
    pk_edge: JoinEq | None = None
    inner_table: str | None = None
    inner_alias: str | None = None
    inner_filters: tuple[Filter, ...] = ()
    # projection roots
    projections: tuple[ProjItem, ...] = ()

    def is_join(self) -> bool:
        return self.op in JOIN_OPS


def node_cost(node: PlanNode, config: OptimizerConfig) -> float:
    """Incremental cost of one operator, children excluded."""
    if node.op in SCAN_OPS:
        return node.table_rows * config.c_tuple
    if node.op == HASH_JOIN:
        build, probe = node.children
        return (
            build.est_rows * config.c_hash_build
            + probe.est_rows * config.c_hash_probe
            + node.est_rows * config.c_tuple
        )
    if node.op == NL_JOIN:
        outer, inner = node.children
        return outer.est_rows * inner.est_rows * config.c_tuple + node.est_rows * config.c_tuple
    if node.op == INDEX_NL_JOIN:
        (outer,) = node.children
        return outer.est_rows * config.c_index_lookup + node.est_rows * config.c_tuple
    # Project / AggregateMin: one pass over the input
    return node.children[0].est_rows * config.c_tuple


def cost_of(node: PlanNode, config: OptimizerConfig) -> float:
    """Total cost of a subtree; additive over operators."""
    return node_cost(node, config) + sum(cost_of(c, config) for c in node.children)


def plan_nodes(plan: PlanNode) -> list[PlanNode]:
    """Postorder enumeration; node ids used by profiles index this list."""
    out: list[PlanNode] = []

    def walk(node: PlanNode) -> None:
        for child in node.children:
            walk(child)
        out.append(node)

    walk(plan)
    return out


def subtree_sizes(plan: PlanNode) -> list[int]:
    """Postorder-aligned subtree node counts; the subtree of postorder
    index i spans indexes [i - size + 1, i]."""
    sizes: list[int] = []

    def walk(node: PlanNode) -> int:
        total = 1
        for child in node.children:
            total += walk(child)
        sizes.append(total)
        return total

    walk(plan)
    return sizes


class _Planner:
    def __init__(self, spec: QuerySpec, estimator: Estimator, config: OptimizerConfig):
        self.spec = spec
        self.estimator = estimator
        self.config = config
        self.catalog = estimator.catalog
        self.graph = join_graph(spec)
        self.aliases = tuple(sorted(a for _, a in spec.relations))

    def estimate(self, aliases: frozenset[str]) -> float:
        return self.estimator.estimate(request_for(self.spec, aliases))

    def scan_node(self, alias: str) -> PlanNode:
        table_name = self.spec.table_of(alias)
        table = self.catalog.get(table_name)
        filters = tuple(p for p in self.spec.filters if p.col.alias == alias)
        rels = frozenset((alias,))
        node = PlanNode(
            op=TEMP_SCAN if table.is_temp else SEQ_SCAN,
            rels=rels,
            est_rows=self.estimate(rels),
            cost=0.0,
            table=table_name,
            alias=alias,
            filters=filters,
            table_rows=self.estimator.table_stats(table_name).row_count,
        )
        return self._with_cost(node)

    def _with_cost(self, node: PlanNode) -> PlanNode:
        total = node_cost(node, self.config) + sum(c.cost for c in node.children)
        return replace(node, cost=total)

    def join_candidates(
        self, left: PlanNode, right: PlanNode, edges: tuple[JoinEq, ...], est_rows: float
    ) -> list[PlanNode]:
        rels = left.rels | right.rels
        out: list[PlanNode] = []
        if edges:
            build, probe = self._build_side(left, right)
            out.append(
                PlanNode(
                    op=HASH_JOIN, rels=rels, est_rows=est_rows, cost=0.0,
                    children=(build, probe), edges=edges,
                )
            )
        out.append(
            PlanNode(
                op=NL_JOIN, rels=rels, est_rows=est_rows, cost=0.0,
                children=(left, right), edges=edges,
            )
        )
        index_join = self._index_candidate(left, right, edges, est_rows)
        if index_join is not None:
            out.append(index_join)
        return [self._with_cost(n) for n in out]

    def _build_side(self, left: PlanNode, right: PlanNode) -> tuple[PlanNode, PlanNode]:
        """Hash join builds on the smaller estimated side; ties go to the
        lexicographically smaller relation set."""
        lkey = (left.est_rows, tuple(sorted(left.rels)))
        rkey = (right.est_rows, tuple(sorted(right.rels)))
        return (left, right) if lkey <= rkey else (right, left)

    def _index_candidate(
        self, outer: PlanNode, inner: PlanNode, edges: tuple[JoinEq, ...], est_rows: float
    ) -> PlanNode | None:
        if inner.op != SEQ_SCAN:
            return None  # inner must be a base table; temp tables have no index
        table = self.catalog.get(inner.table)
        pk = table.primary_key
        if pk is None or inner.table not in self.catalog.indexes:
            return None
        pk_edge = None
        for edge in edges:
            inner_side = edge.left if edge.left.alias == inner.alias else edge.right
            if inner_side.column == pk.name:
                pk_edge = edge
                break
        if pk_edge is None:
            return None
        residual = tuple(e for e in edges if e is not pk_edge)
        return PlanNode(
            op=INDEX_NL_JOIN,
            rels=outer.rels | inner.rels,
            est_rows=est_rows,
            cost=0.0,
            children=(outer,),
            edges=residual,
            pk_edge=pk_edge,
            inner_table=inner.table,
            inner_alias=inner.alias,
            inner_filters=inner.filters,
        )

    def run(self) -> PlanNode:
        if not self.config.allow_cartesian and not self.graph.is_connected():
            raise DisconnectedJoinGraph(
                f"query over {self.aliases} needs a Cartesian product"
            )
        best: dict[frozenset[str], PlanNode] = {}
        for alias in self.aliases:
            best[frozenset((alias,))] = self.scan_node(alias)

        for size in range(2, len(self.aliases) + 1):
            for combo in combinations(self.aliases, size):
                subset = frozenset(combo)
                if not self.config.allow_cartesian and not self.graph.is_connected(subset):
                    continue
                est_rows = self.estimate(subset)
                winner: PlanNode | None = None
                right_sizes = (1,) if self.config.shape == "left_deep" else range(1, size)
                for right_size in right_sizes:
                    for right_combo in combinations(combo, right_size):
                        right = frozenset(right_combo)
                        left = subset - right
                        left_plan = best.get(left)
                        right_plan = best.get(right)
                        if left_plan is None or right_plan is None:
                            continue
                        edges = self.graph.edges_between(left, right)
                        if not edges and not self.config.allow_cartesian:
                            continue
                        if not edges:
                            candidates = [
                                self._with_cost(
                                    PlanNode(
                                        op=NL_JOIN, rels=subset, est_rows=est_rows,
                                        cost=0.0, children=(left_plan, right_plan),
                                    )
                                )
                            ]
                        else:
                            candidates = self.join_candidates(left_plan, right_plan, edges, est_rows)
                        for cand in candidates:
                            if winner is None or cand.cost < winner.cost:
                                winner = cand
                if winner is not None:
                    best[subset] = winner

        full = frozenset(self.aliases)
        if full not in best:
            raise DisconnectedJoinGraph(f"no join path covers {sorted(full)}")
        return self._add_root(best[full])

    def _add_root(self, plan: PlanNode) -> PlanNode:
        projections = self.spec.projections
        if not projections:
            return plan
        if projections[0].agg == "min":
            node = PlanNode(
                op=AGGREGATE_MIN, rels=plan.rels, est_rows=1.0, cost=0.0,
                children=(plan,), projections=projections,
            )
        else:
            node = PlanNode(
                op=PROJECT, rels=plan.rels, est_rows=plan.est_rows, cost=0.0,
                children=(plan,), projections=projections,
            )
        return self._with_cost(node)


def optimize(
    spec: QuerySpec, estimator: Estimator, config: OptimizerConfig = OptimizerConfig()
) -> tuple[PlanNode, int]:
    """Pick the minimum-cost plan; returns (plan, planning time in us)."""
    start = time.perf_counter_ns()
    estimator.begin_run()
    plan = _Planner(spec, estimator, config).run()
    return plan, (time.perf_counter_ns() - start) // 1000


# ---------------------------------------------------------------------------
# EXPLAIN text

def _fmt(value: float) -> str:
    return f"{value:g}"


def describe_node(node: PlanNode) -> str:
    if node.op in SCAN_OPS:
        text = f"{node.op} {node.alias}({node.table})"
        if node.filters:
            text += " filter=(" + " AND ".join(render_predicate(p) for p in node.filters) + ")"
    elif node.op == INDEX_NL_JOIN:
        text = f"{node.op} inner={node.inner_alias}({node.inner_table}) pk=({render_predicate(node.pk_edge)})"
        if node.edges:
            text += " residual=(" + " AND ".join(render_predicate(e) for e in node.edges) + ")"
        if node.inner_filters:
            text += " filter=(" + " AND ".join(render_predicate(p) for p in node.inner_filters) + ")"
    elif node.op in JOIN_OPS:
        text = node.op
        if node.edges:
            text += " on=(" + " AND ".join(render_predicate(e) for e in node.edges) + ")"
        else:
            text += " on=(true)"
    else:
        cols = ", ".join(
            f"MIN({p.col})" if p.agg == "min" else str(p.col) for p in node.projections
        )
        text = f"{node.op} [{cols}]"
    return text


def explain(plan: PlanNode) -> str:
    """Indented plan tree; stable format, two spaces per level."""
    lines: list[str] = []

    def walk(node: PlanNode, depth: int) -> None:
        lines.append(
            "  " * depth
            + f"{describe_node(node)} rows={_fmt(node.est_rows)} cost={_fmt(node.cost)}"
        )
        for child in node.children:
            walk(child, depth + 1)

    walk(plan, 0)
    return "\n".join(lines)
