"""ANALYZE-style per-column statistics: equi-depth histogram over non-MCV
values, most-common-value list, distinct count, min/max, null fraction.

Temp tables get exact statistics (full scan, full MCV coverage) so
re-planning after materialization sees truth at the cut.
"""
from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from .storage import Catalog, Table, Value

DEFAULT_BUCKETS = 100
DEFAULT_MCVS = 100


@dataclass(frozen=True)
class Histogram:
    bounds: tuple[Value, ...]  # sorted; length B+1 for B buckets, () when empty
    rows_per_bucket: float  # equal depth by construction; table-scaled count

    @property
    def bucket_count(self) -> int:
        return max(len(self.bounds) - 1, 0)

    @property
    def total_rows(self) -> float:
        return self.bucket_count * self.rows_per_bucket


@dataclass(frozen=True)
class McvList:
    entries: tuple[tuple[Value, float], ...]  # (value, row fraction), descending frequency
    capacity: int

    def frequency(self, value: Value) -> float | None:
        for v, frac in self.entries:
            if v == value:
                return frac
        return None

    @property
    def total_fraction(self) -> float:
        return sum(frac for _, frac in self.entries)


@dataclass(frozen=True)
class ColumnStats:
    ndv: int
    min: Value
    max: Value
    null_frac: float
    mcv: McvList
    hist: Histogram


@dataclass(frozen=True)
class TableStats:
    row_count: int
    columns: dict[str, ColumnStats] = field(default_factory=dict)
    exact: bool = False


def _reservoir_sample(rows: list, k: int, seed: int) -> list:
    rng = random.Random(seed)
    sample = list(rows[:k])
    for i in range(k, len(rows)):
        j = rng.randint(0, i)
        if j < k:
            sample[j] = rows[i]
    return sample


def _build_histogram(values: list[Value], bucket_count: int, scale: float) -> Histogram:
    if not values:
        return Histogram((), 0.0)
    values = sorted(values)
    n = len(values)
    b = min(bucket_count, n)
    # boundary value belongs to the lower bucket
    bounds = tuple(values[(i * (n - 1)) // b] for i in range(b + 1))
    return Histogram(bounds, (n / b) * scale)


def _column_stats(
    values: list[Value],
    bucket_count: int,
    mcv_capacity: int,
    sample_n: int,
    row_count: int,
    sample_fraction: float,
) -> ColumnStats:
    non_null = [v for v in values if v is not None]
    null_frac = (len(values) - len(non_null)) / sample_n if sample_n else 0.0
    if not non_null:
        return ColumnStats(0, None, None, null_frac, McvList((), mcv_capacity), Histogram((), 0.0))
    counts = Counter(non_null)
    ndv = min(row_count, math.ceil(len(counts) / sample_fraction))
    head = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:mcv_capacity]
    mcv = McvList(tuple((v, c / sample_n) for v, c in head), mcv_capacity)
    mcv_values = {v for v, _ in head}
    remaining = [v for v in non_null if v not in mcv_values]
    scale = row_count / sample_n
    hist = _build_histogram(remaining, bucket_count, scale)
    return ColumnStats(ndv, min(non_null), max(non_null), null_frac, mcv, hist)


def analyze(
    table: Table,
    bucket_count: int = DEFAULT_BUCKETS,
    mcv_capacity: int = DEFAULT_MCVS,
    sample_fraction: float = 1.0,
    seed: int = 0,
    exact: bool = False,
) -> TableStats:
    """Collect statistics from a uniform sample of ceil(f*N) rows.

    With sample_fraction=1 the ndv and all frequencies are exact. Sampled
    ndv uses the sampled-distinct count scaled by 1/f, capped at N.
    """
    if bucket_count < 1:
        raise ValueError("bucket_count must be >= 1")
    if mcv_capacity < 0:
        raise ValueError("mcv_capacity must be >= 0")
    if not 0 < sample_fraction <= 1:
        raise ValueError("sample_fraction must be in (0, 1]")
    n = table.row_count
    if n == 0:
        return TableStats(0, {c.name: _empty_column() for c in table.columns}, exact=exact)
    if sample_fraction >= 1.0:
        sample = table.rows
    else:
        sample = _reservoir_sample(table.rows, math.ceil(sample_fraction * n), seed)
    sample_n = len(sample)
    columns = {}
    for i, col in enumerate(table.columns):
        values = [row[i] for row in sample]
        columns[col.name] = _column_stats(
            values, bucket_count, mcv_capacity, sample_n, n, sample_fraction
        )
    return TableStats(n, columns, exact=exact)


def _empty_column() -> ColumnStats:
    return ColumnStats(0, None, None, 0.0, McvList((), 0), Histogram((), 0.0))


def analyze_temp(table: Table, bucket_count: int = DEFAULT_BUCKETS, mcv_capacity: int = DEFAULT_MCVS) -> TableStats:
    """Exact statistics for a freshly materialized temp table."""
    assert table.is_temp
    return analyze(table, bucket_count, mcv_capacity, sample_fraction=1.0, exact=True)


def analyze_catalog(catalog: Catalog, **kwargs) -> dict[str, TableStats]:
    return {
        name: (analyze_temp(t) if t.is_temp else analyze(t, **kwargs))
        for name, t in sorted(catalog.tables.items())
    }


# ---------------------------------------------------------------------------
# JSON round-trip, for fixtures and report reproducibility

def stats_to_json(stats: dict[str, TableStats]) -> str:
    payload = {}
    for table, ts in sorted(stats.items()):
        payload[table] = {
            "row_count": ts.row_count,
            "exact": ts.exact,
            "columns": {
                name: {
                    "ndv": cs.ndv,
                    "min": cs.min,
                    "max": cs.max,
                    "null_frac": cs.null_frac,
                    "mcv_capacity": cs.mcv.capacity,
                    "mcv": [[v, f] for v, f in cs.mcv.entries],
                    "hist_bounds": list(cs.hist.bounds),
                    "rows_per_bucket": cs.hist.rows_per_bucket,
                }
                for name, cs in sorted(ts.columns.items())
            },
        }
    return json.dumps(payload, indent=2)


def stats_from_json(text: str) -> dict[str, TableStats]:
    payload = json.loads(text)
    out = {}
    for table, ts in payload.items():
        columns = {}
        for name, cs in ts["columns"].items():
            columns[name] = ColumnStats(
                ndv=cs["ndv"],
                min=cs["min"],
                max=cs["max"],
                null_frac=cs["null_frac"],
                mcv=McvList(tuple((v, f) for v, f in cs["mcv"]), cs["mcv_capacity"]),
                hist=Histogram(tuple(cs["hist_bounds"]), cs["rows_per_bucket"]),
            )
        out[table] = TableStats(ts["row_count"], columns, exact=ts["exact"])
    return out

