"""Cardinality estimation.

Three answer sources behind one interface:

* the default estimator -- independence and uniformity over per-column
  statistics, join selectivity 1/max(ndv) per equi-join conjunct;
* a true-cardinality oracle realized by executing the sub-join;
* the perfect-(n) hybrid, answering requests over at most n relations
  from the oracle and composing oracle factors into the default formula
  for larger requests.

Every estimate issued during plan enumeration is tallied per join size,
and unique requests are memoized per optimizer run.
"""
from __future__ import annotations

import json
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import MissingStats
from .sql import (
    ColRef,
    Eq,
    Filter,
    Gt,
    In,
    JoinEq,
    Like,
    Lt,
    QuerySpec,
    evaluate_filter,
    render_predicate,
)
from .stats import ColumnStats, TableStats
from .storage import Catalog, Value

DEFAULT_LIKE_SELECTIVITY = 0.05
DEFAULT_RANGE_SELECTIVITY = 1.0 / 3.0  # no-histogram fallback


@dataclass(frozen=True)
class CardinalityRequest:
    """Canonical, hashable description of one sub-join to estimate."""

    rels: tuple[tuple[str, str], ...]  # (alias, table), sorted by alias
    filters: tuple[Filter, ...]
    join_edges: tuple[JoinEq, ...]

    @property
    def size(self) -> int:
        return len(self.rels)

    @property
    def aliases(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.rels)

    def key(self) -> str:
        rels = ", ".join(f"{t} {a}" for a, t in self.rels)
        preds = " AND ".join(
            [render_predicate(p) for p in self.filters] + [render_predicate(e) for e in self.join_edges]
        )
        return f"[{rels}] {preds}"


def request_for(spec: QuerySpec, aliases: Iterable[str]) -> CardinalityRequest:
    """Restrict a query to a subset of its aliases, in canonical form."""
    subset = frozenset(aliases)
    rels = tuple(sorted((a, spec.table_of(a)) for a in subset))
    filters = tuple(
        sorted((p for p in spec.filters if p.col.alias in subset), key=render_predicate)
    )
    edges = tuple(
        sorted(
            (e.normalized() for e in spec.join_edges if e.aliases() <= subset),
            key=render_predicate,
        )
    )
    return CardinalityRequest(rels, filters, edges)


def sub_request(req: CardinalityRequest, aliases: Iterable[str]) -> CardinalityRequest:
    subset = frozenset(aliases)
    return CardinalityRequest(
        tuple(r for r in req.rels if r[0] in subset),
        tuple(p for p in req.filters if p.col.alias in subset),
        tuple(e for e in req.join_edges if e.aliases() <= subset),
    )


# ---------------------------------------------------------------------------
# Selectivity from column statistics

def _succ(value: Value) -> Value:
    """Immediate successor in column order; P(v <= x) == P(v < succ(x))."""
    if isinstance(value, int):
        return value + 1
    return value + "\x00"


def _hist_fraction_below(cs: ColumnStats, x: Value) -> float:
    """Approximate fraction of histogram-covered rows with value < x."""
    bounds = cs.hist.bounds
    buckets = cs.hist.bucket_count
    if buckets == 0:
        # no histogram (all mass in MCVs, or stats without a scan); the
        # caller scales by the histogram mass, which is 0 in the former case
        return DEFAULT_RANGE_SELECTIVITY
    if x <= bounds[0]:
        return 0.0
    if x > bounds[-1]:
        return 1.0
    i = bisect_left(bounds, x) - 1  # bucket (bounds[i], bounds[i+1]]
    lo, hi = bounds[i], bounds[i + 1]
    if isinstance(x, int) and hi != lo:
        within = min(1.0, max(0.0, (x - lo) / (hi - lo)))
    else:
        within = 0.5 if hi != lo else 1.0  # text: midpoint rule inside a bucket
    return (i + within) / buckets


def _fraction_below(cs: ColumnStats, x: Value) -> float:
    """P(v < x) over all rows, combining the MCV list and histogram."""
    mcv_part = sum(f for v, f in cs.mcv.entries if v < x)
    hist_mass = max(0.0, 1.0 - cs.mcv.total_fraction - cs.null_frac)
    return mcv_part + hist_mass * _hist_fraction_below(cs, x)


def eq_selectivity(cs: ColumnStats, value: Value) -> float:
    if cs.ndv == 0 or value is None:
        return 0.0
    freq = cs.mcv.frequency(value)
    if freq is not None:
        return freq
    remaining_ndv = cs.ndv - len(cs.mcv.entries)
    if remaining_ndv <= 0:
        return 0.0
    remaining_frac = max(0.0, 1.0 - cs.mcv.total_fraction - cs.null_frac)
    return remaining_frac / remaining_ndv


def _nonnull_frac(cs: ColumnStats) -> float:
    return max(0.0, 1.0 - cs.null_frac)


def filter_selectivity(cs: ColumnStats, pred: Filter, default_like: float) -> float:
    if cs.ndv == 0:
        return 0.0
    if isinstance(pred, Eq):
        return eq_selectivity(cs, pred.value)
    if isinstance(pred, Lt):
        return min(1.0, max(0.0, _fraction_below(cs, pred.value)))
    if isinstance(pred, Gt):
        sel = _nonnull_frac(cs) - _fraction_below(cs, _succ(pred.value))
        return min(1.0, max(0.0, sel))
    if isinstance(pred, In):
        return min(1.0, sum(eq_selectivity(cs, v) for v in pred.values))
    return _like_selectivity(cs, pred.pattern, default_like)


def _like_selectivity(cs: ColumnStats, pattern: str, default_like: float) -> float:
    segments = pattern.split("%")
    if len(segments) == 1:
        return eq_selectivity(cs, pattern)  # no wildcard: plain equality
    prefix = segments[0]
    if prefix and all(s == "" for s in segments[1:]):
        # prefix pattern: range reduction over the column order
        sel = _fraction_below(cs, _succ_prefix(prefix)) - _fraction_below(cs, prefix)
        return min(1.0, max(0.0, sel))
    if all(s == "" for s in segments):
        return _nonnull_frac(cs)  # '%' matches every non-null value
    return default_like


def _succ_prefix(prefix: str) -> str:
    # upper bound of the range of strings starting with prefix
    return prefix[:-1] + chr(ord(prefix[-1]) + 1)


# ---------------------------------------------------------------------------
# Estimator

@dataclass(frozen=True)
class EstimatorConfig:
    mode: str = "default"  # default | perfect | overrides
    perfect_n: int = 0
    composition: str = "anchored"  # anchored | pairwise, for requests larger than n
    default_like_selectivity: float = DEFAULT_LIKE_SELECTIVITY


class Estimator:
    """Answers cardinality requests; counts and memoizes per optimizer run.

    Reads are side-effect free apart from the run memo, the per-join-size
    tally, and oracle memo updates; one optimizer run owns the instance.
    """

    def __init__(
        self,
        catalog: Catalog,
        stats: dict[str, TableStats],
        config: EstimatorConfig = EstimatorConfig(),
        oracle: "CardinalityOracle | None" = None,
        overrides: dict[CardinalityRequest, float] | None = None,
        count_estimates: bool = True,
    ):
        if config.mode == "perfect" and oracle is None:
            raise ValueError("perfect mode requires an oracle")
        self.catalog = catalog
        self.stats = stats
        self.config = config
        self.oracle = oracle
        self.overrides = overrides if overrides is not None else {}
        self.count_estimates = count_estimates
        self.counter: Counter[int] = Counter()
        self.oracle_answered: set[CardinalityRequest] = set()
        self._run_memo: dict[CardinalityRequest, float] = {}

    def begin_run(self) -> None:
        self._run_memo = {}

    def reset_counts(self) -> None:
        self.counter = Counter()

    def count_report(self) -> dict[int, int]:
        """Per-join-size tally of unique requests, across runs since reset."""
        return dict(sorted(self.counter.items()))

    def run_estimates(self) -> dict[CardinalityRequest, float]:
        """Snapshot of every request answered in the current run."""
        return dict(self._run_memo)

    def estimate(self, req: CardinalityRequest) -> float:
        if req in self._run_memo:
            return self._run_memo[req]
        value = self._dispatch(req)
        self._run_memo[req] = value
        if self.count_estimates:
            self.counter[req.size] += 1
        return value

    def _dispatch(self, req: CardinalityRequest) -> float:
        if self.config.mode == "overrides" and req in self.overrides:
            return self.overrides[req]
        if self.config.mode == "perfect":
            return self.perfect_n_estimate(req, self.config.perfect_n)
        return self.default_estimate(req)

    # -- default formula ----------------------------------------------------

    def table_stats(self, table: str) -> TableStats:
        try:
            return self.stats[table]
        except KeyError:
            raise MissingStats(f"no statistics for table {table!r}; run analyze first") from None

    def _column_stats(self, req: CardinalityRequest, ref: ColRef) -> ColumnStats:
        table = dict(req.rels)[ref.alias]
        ts = self.table_stats(table)
        try:
            return ts.columns[ref.column]
        except KeyError:
            raise MissingStats(f"no statistics for column {table}.{ref.column}") from None

    def single_table_estimate(self, req: CardinalityRequest, alias: str) -> float:
        table = dict(req.rels)[alias]
        ts = self.table_stats(table)
        est = float(ts.row_count)
        for pred in req.filters:
            if pred.col.alias != alias:
                continue
            cs = ts.columns.get(pred.col.column)
            if cs is None:
                raise MissingStats(f"no statistics for column {table}.{pred.col.column}")
            est *= filter_selectivity(cs, pred, self.config.default_like_selectivity)
        return est

    def _edge_selectivity(self, req: CardinalityRequest, edge: JoinEq) -> float:
        left = self._column_stats(req, edge.left)
        right = self._column_stats(req, edge.right)
        ndv = max(left.ndv, right.ndv)
        return 1.0 / ndv if ndv > 0 else 0.0

    def default_estimate(self, req: CardinalityRequest) -> float:
        est = 1.0
        for alias, _ in req.rels:
            est *= self.single_table_estimate(req, alias)
        for edge in req.join_edges:
            est *= self._edge_selectivity(req, edge)
        return self._clamp(req, est)

    def _clamp(self, req: CardinalityRequest, est: float) -> float:
        if all(self.table_stats(t).row_count > 0 for _, t in req.rels):
            return max(est, 1.0)
        return max(est, 0.0)

    # -- perfect-(n) hybrid ---------------------------------------------------

    def perfect_n_estimate(self, req: CardinalityRequest, n: int) -> float:
        if n <= 0:
            return self.default_estimate(req)
        if req.size <= n:
            self.oracle_answered.add(req)
            return float(self.oracle.true_cardinality(req))
        if n == 1 or (self.config.composition == "anchored" and n >= 3):
            max_anchor = 1 if n == 1 else n
            return self._anchored_estimate(req, max_anchor)
        return self._pairwise_estimate(req)

    def _pairwise_estimate(self, req: CardinalityRequest) -> float:
        """True single-table factors; each edge replaced by the pair's true
        selectivity true(a join b) / (true(a) * true(b))."""
        singles = {a: float(self.oracle.true_cardinality(sub_request(req, {a}))) for a in req.aliases}
        est = 1.0
        for v in singles.values():
            est *= v
        for edge in req.join_edges:
            a, b = sorted(edge.aliases())
            pair_true = float(self.oracle.true_cardinality(sub_request(req, {a, b})))
            denom = singles[a] * singles[b]
            est *= pair_true / denom if denom > 0 else 0.0
        return self._clamp(req, est)

    def _anchored_estimate(self, req: CardinalityRequest, max_anchor: int) -> float:
        """Cover the relations with the largest oracle-known connected
        subsets (largest first, ties by canonical order); crossing edges
        keep their default selectivities."""
        anchors = self._anchor_cover(req, max_anchor)
        est = 1.0
        covered_pairs: set[frozenset[str]] = set()
        for anchor in anchors:
            est *= float(self.oracle.true_cardinality(sub_request(req, anchor)))
            covered_pairs.update(
                frozenset(p) for p in combinations(sorted(anchor), 2)
            )
        for edge in req.join_edges:
            if edge.aliases() not in covered_pairs:
                est *= self._edge_selectivity(req, edge)
        return self._clamp(req, est)

    def _anchor_cover(self, req: CardinalityRequest, max_anchor: int) -> list[frozenset[str]]:
        aliases = sorted(req.aliases)
        adjacency: dict[str, set[str]] = {a: set() for a in aliases}
        for edge in req.join_edges:
            a, b = sorted(edge.aliases())
            adjacency[a].add(b)
            adjacency[b].add(a)
        candidates = [
            frozenset(combo)
            for size in range(min(max_anchor, len(aliases)), 0, -1)
            for combo in combinations(aliases, size)
            if _is_connected_subset(frozenset(combo), adjacency)
        ]
        cover: list[frozenset[str]] = []
        remaining = set(aliases)
        for cand in candidates:
            if cand <= remaining:
                cover.append(cand)
                remaining -= cand
            if not remaining:
                break
        return cover


def _is_connected_subset(subset: frozenset[str], adjacency: dict[str, set[str]]) -> bool:
    seen: set[str] = set()
    stack = [min(subset)]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend((adjacency[node] & subset) - seen)
    return seen == subset


# ---------------------------------------------------------------------------
# True-cardinality oracle

class CardinalityOracle:
    """Exact sub-join row counts, realized by executing the sub-join.

    Results are memoized per (table contents, request); the memo can be
    persisted to JSON so repeated benchmark runs skip recomputation.
    Requests touching temp tables are answered but never memoized.
    """

    def __init__(self, catalog: Catalog, stats: dict[str, TableStats]):
        self.catalog = catalog
        self.stats = stats
        self.memo: dict[str, int] = {}
        self.calls = 0

    def _memo_key(self, req: CardinalityRequest) -> str | None:
        fingerprints = []
        for _, table in req.rels:
            t = self.catalog.get(table)
            if t.is_temp:
                return None
            fingerprints.append(t.fingerprint())
        return "|".join(fingerprints) + "||" + req.key()

    def true_cardinality(self, req: CardinalityRequest) -> int:
        key = self._memo_key(req)
        if key is not None and key in self.memo:
            return self.memo[key]
        self.calls += 1
        if req.size == 1:
            count = self._single_table_count(req)
        else:
            count = self._execute_count(req)
        if key is not None:
            self.memo[key] = count
        return count

    def _single_table_count(self, req: CardinalityRequest) -> int:
        alias, table = req.rels[0]
        t = self.catalog.get(table)
        if not req.filters:
            return t.row_count
        cols = [(t.column_index(p.col.column), p) for p in req.filters]
        count = 0
        for row in t.rows:
            if all(evaluate_filter(p, row[i]) for i, p in cols):
                count += 1
        return count

    def _execute_count(self, req: CardinalityRequest) -> int:
        # local imports: the oracle plans and runs sub-joins through the
        # same engine, which imports this module
        from .executor import execute
        from .optimizer import OptimizerConfig, optimize

        spec = QuerySpec(
            relations=tuple((t, a) for a, t in req.rels),
            filters=req.filters,
            join_edges=req.join_edges,
            projections=(),
        )
        estimator = Estimator(self.catalog, self.stats, count_estimates=False)
        plan, _ = optimize(spec, estimator, OptimizerConfig(allow_cartesian=True))
        result = execute(plan, self.catalog)
        return len(result.rows)

    # -- persistence ----------------------------------------------------------

    def save_memo(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.memo, fh, indent=0)

    def load_memo(self, path: str) -> int:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
        self.memo.update(loaded)
        return len(loaded)
