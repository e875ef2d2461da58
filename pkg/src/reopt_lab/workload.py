"""Synthetic datasets with the classic estimation pathologies, and the
benchmark query corpus over them.

Four generators:

* stocks      -- uniform company table joined by a Zipf-skewed trades
                 table; filtering on the top symbol makes the default
                 join estimate collapse while truth explodes.
* employees   -- age and salary with tunable rank correlation via a
                 Gaussian copula; conjunctive filters underestimate.
* chain       -- head -> mid -> tail -> leaf chain where a category
                 filter on the head correlates with fan-out two and
                 three edges away (join-crossing correlation).
* star        -- snowflake: a hub, skewed satellites whose hot hub ids
                 overlap pairwise, and per-satellite dimension tables
                 with Zipf-popular members; deep joins compound the
                 underestimation.

All generation is a pure function of (spec, seed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .sql import QuerySpec, parse
from .storage import Catalog, ColumnMeta, ColumnType, Table

INT64 = ColumnType.INT64
TEXT = ColumnType.TEXT


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # stocks | employees | chain | star
    sizes: dict[str, int] = field(default_factory=dict)
    zipf_s: float = 1.1
    correlation_rho: float = 0.0
    seed: int = 7


def _col(name: str, ctype: ColumnType, pk: bool = False) -> ColumnMeta:
    return ColumnMeta(name, ctype, is_primary_key=pk)


def _symbol(i: int) -> str:
    """Deterministic ticker symbols; ids 1 and 2 are the market darlings."""
    if i == 1:
        return "APPL"
    if i == 2:
        return "GOOG"
    n = i - 3
    letters = []
    for _ in range(3):
        n, r = divmod(n, 26)
        letters.append(chr(ord("A") + r))
    return "".join(reversed(letters))


def _zipf_probs(n: int, s: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    weights = ranks**-s
    return weights / weights.sum()


def _check_sizes(spec: GeneratorSpec, defaults: dict[str, int]) -> dict[str, int]:
    sizes = {**defaults, **spec.sizes}
    unknown = set(spec.sizes) - set(defaults)
    if unknown:
        raise InvalidSpec(f"unknown size keys {sorted(unknown)} for kind {spec.kind!r}")
    for key, value in sizes.items():
        if value < 1:
            raise InvalidSpec(f"size {key}={value} must be >= 1")
    return sizes


def _generate_stocks(spec: GeneratorSpec, catalog: Catalog) -> list[Table]:
    sizes = _check_sizes(spec, {"companies": 1000, "trades": 60_000})
    rng = np.random.default_rng(spec.seed)
    n_companies, n_trades = sizes["companies"], sizes["trades"]

    companies = Table(
        "company",
        [_col("id", INT64, pk=True), _col("symbol", TEXT), _col("company", TEXT)],
        [(i, _symbol(i), f"{_symbol(i)} Inc.") for i in range(1, n_companies + 1)],
    )
    company_ids = rng.choice(
        np.arange(1, n_companies + 1), size=n_trades, p=_zipf_probs(n_companies, spec.zipf_s)
    )
    shares = rng.integers(1, 10_001, size=n_trades)
    trades = Table(
        "trades",
        [_col("company_id", INT64), _col("shares", INT64)],
        list(zip(company_ids.tolist(), shares.tolist())),
    )
    return [catalog.register(companies), catalog.register(trades)]


def _generate_employees(spec: GeneratorSpec, catalog: Catalog) -> list[Table]:
    sizes = _check_sizes(
        spec,
        {"departments": 40, "employees": 15_000, "projects": 300, "assignments": 25_000},
    )
    rng = np.random.default_rng(spec.seed)
    n_dept, n_emp = sizes["departments"], sizes["employees"]
    n_proj, n_assign = sizes["projects"], sizes["assignments"]

    regions = ["north", "south", "east", "west", "central"]
    departments = Table(
        "departments",
        [_col("id", INT64, pk=True), _col("region", TEXT)],
        [(i, regions[(i - 1) % len(regions)]) for i in range(1, n_dept + 1)],
    )

    # Gaussian copula: adjust rho so the measured *rank* correlation lands
    # on the requested value
    rho = 2.0 * math.sin(math.pi * spec.correlation_rho / 6.0)
    cov = np.array([[1.0, rho], [rho, 1.0]])
    z = rng.multivariate_normal([0.0, 0.0], cov, size=n_emp)
    ages = np.clip(42 + 12 * z[:, 0], 18, 70).astype(np.int64)
    salaries = np.clip(90_000 + 35_000 * z[:, 1], 20_000, 250_000).astype(np.int64)
    dept_ids = rng.integers(1, n_dept + 1, size=n_emp)
    employees = Table(
        "employees",
        [
            _col("id", INT64, pk=True),
            _col("dept_id", INT64),
            _col("age", INT64),
            _col("salary", INT64),
        ],
        list(zip(range(1, n_emp + 1), dept_ids.tolist(), ages.tolist(), salaries.tolist())),
    )

    budgets = rng.integers(10_000, 2_000_001, size=n_proj)
    proj_depts = rng.integers(1, n_dept + 1, size=n_proj)
    projects = Table(
        "projects",
        [_col("id", INT64, pk=True), _col("dept_id", INT64), _col("budget", INT64)],
        list(zip(range(1, n_proj + 1), proj_depts.tolist(), budgets.tolist())),
    )

    emp_ids = rng.integers(1, n_emp + 1, size=n_assign)
    proj_ids = rng.choice(np.arange(1, n_proj + 1), size=n_assign, p=_zipf_probs(n_proj, 0.8))
    hours = rng.integers(1, 301, size=n_assign)
    assignments = Table(
        "assignments",
        [_col("emp_id", INT64), _col("proj_id", INT64), _col("hours", INT64)],
        list(zip(emp_ids.tolist(), proj_ids.tolist(), hours.tolist())),
    )
    return [
        catalog.register(departments),
        catalog.register(employees),
        catalog.register(projects),
        catalog.register(assignments),
    ]


def _generate_chain(spec: GeneratorSpec, catalog: Catalog) -> list[Table]:
    sizes = _check_sizes(
        spec,
        {
            "head": 2000,
            "mid": 15_000,
            "hot_heads": 20,
            "tail_fanout_hot": 80,
            "leaf_fanout_hot": 4,
        },
    )
    rng = np.random.default_rng(spec.seed)
    n_head, n_mid = sizes["head"], sizes["mid"]
    hot_heads = sizes["hot_heads"]

    head = Table(
        "head",
        [_col("id", INT64, pk=True), _col("category", TEXT)],
        [(i, "hot" if i <= hot_heads else "cold") for i in range(1, n_head + 1)],
    )
    head_ids = rng.integers(1, n_head + 1, size=n_mid)
    mid = Table(
        "mid",
        [_col("id", INT64, pk=True), _col("head_id", INT64)],
        list(zip(range(1, n_mid + 1), head_ids.tolist())),
    )

    # fan-out correlates with the *head's* category, two edges away
    mid_hot = head_ids <= hot_heads
    tail_fanouts = np.where(mid_hot, sizes["tail_fanout_hot"], 1)
    tail_mids = np.repeat(np.arange(1, n_mid + 1), tail_fanouts)
    tail_hot = np.repeat(mid_hot, tail_fanouts)
    n_tail = len(tail_mids)
    kinds = np.array(["x", "y", "z"])[rng.integers(0, 3, size=n_tail)]
    tail = Table(
        "tail",
        [_col("id", INT64, pk=True), _col("mid_id", INT64), _col("kind", TEXT)],
        list(zip(range(1, n_tail + 1), tail_mids.tolist(), kinds.tolist())),
    )

    leaf_fanouts = np.where(tail_hot, sizes["leaf_fanout_hot"], 1)
    leaf_tails = np.repeat(np.arange(1, n_tail + 1), leaf_fanouts)
    scores = rng.integers(1, 1001, size=len(leaf_tails))
    leaf = Table(
        "leaf",
        [_col("tail_id", INT64), _col("score", INT64)],
        list(zip(leaf_tails.tolist(), scores.tolist())),
    )
    return [catalog.register(t) for t in (head, mid, tail, leaf)]


# Satellite shapes: (hot window start, hot window width, hot fanout, cold fanout)
# Hot windows overlap pairwise (s1/s2 by 30 ids, s2/s3 by 10) but never all
# three at once, so two-way joins explode while deeper ones stay bounded.
_SATELLITES = {
    1: (1, 40, 250, 1),  # strong skew
    2: (11, 40, 250, 1),  # strong, hot set overlaps sat1 by 30 ids
    3: (41, 40, 100, 1),  # medium, disjoint from sat1
    4: (0, 0, 0, 2),  # mild, uniform
    5: (0, 0, 0, 2),
    6: (0, 0, 0, 1),
}


def _generate_star(spec: GeneratorSpec, catalog: Catalog) -> list[Table]:
    sizes = _check_sizes(spec, {"hub": 4000, "dims": 900, "satellites": 6})
    n_hub, n_dim = sizes["hub"], sizes["dims"]
    n_sat = sizes["satellites"]
    if not 3 <= n_sat <= len(_SATELLITES):
        raise InvalidSpec(f"satellites must be in 3..{len(_SATELLITES)}")
    rng = np.random.default_rng(spec.seed)

    hub = Table(
        "hub",
        [_col("id", INT64, pk=True), _col("code", TEXT)],
        [(i, f"H{i:05d}") for i in range(1, n_hub + 1)],
    )
    tables = [catalog.register(hub)]

    for k in range(1, n_sat + 1):
        start, width, hot_f, cold_f = _SATELLITES[k]
        fanouts = np.full(n_hub, cold_f, dtype=np.int64)
        if width:
            fanouts[start - 1 : start - 1 + width] = hot_f
        hub_ids = np.repeat(np.arange(1, n_hub + 1), fanouts)
        rng.shuffle(hub_ids)
        n_rows = len(hub_ids)
        dim_ids = rng.choice(np.arange(1, n_dim + 1), size=n_rows, p=_zipf_probs(n_dim, 1.0))
        v = rng.integers(1, 101, size=n_rows)
        sat = Table(
            f"sat{k}",
            [_col("hub_id", INT64), _col("dim_id", INT64), _col("v", INT64)],
            list(zip(hub_ids.tolist(), dim_ids.tolist(), v.tolist())),
        )
        tables.append(catalog.register(sat))

        weights = rng.integers(1, 1001, size=n_dim)
        dim = Table(
            f"dim{k}",
            [_col("id", INT64, pk=True), _col("name", TEXT), _col("weight", INT64)],
            [
                (i, f"kw{k}_{i:05d}", int(weights[i - 1]))
                for i in range(1, n_dim + 1)
            ],
        )
        tables.append(catalog.register(dim))
    return tables


_GENERATORS = {
    "stocks": _generate_stocks,
    "employees": _generate_employees,
    "chain": _generate_chain,
    "star": _generate_star,
}


def generate(spec: GeneratorSpec, catalog: Catalog) -> list[Table]:
    """Generate one dataset into the catalog; bit-reproducible per seed."""
    try:
        gen = _GENERATORS[spec.kind]
    except KeyError:
        raise InvalidSpec(f"unknown generator kind {spec.kind!r}") from None
    return gen(spec, catalog)


# ---------------------------------------------------------------------------
# The benchmark corpus

def _scaled(value: int, scale: float) -> int:
    return max(1, round(value * scale))


def corpus_specs(seed: int = 7, scale: float = 1.0) -> list[GeneratorSpec]:
    return [
        GeneratorSpec(
            "stocks",
            {"companies": 1000, "trades": _scaled(60_000, scale)},
            zipf_s=1.1,
            seed=seed,
        ),
        GeneratorSpec(
            "employees",
            {
                "employees": _scaled(15_000, scale),
                "assignments": _scaled(25_000, scale),
            },
            correlation_rho=0.85,
            seed=seed + 1,
        ),
        GeneratorSpec(
            "chain",
            {"mid": _scaled(15_000, scale)},
            seed=seed + 2,
        ),
        GeneratorSpec(
            "star",
            {"hub": _scaled(4000, scale), "dims": 900},
            seed=seed + 3,
        ),
    ]


WORKLOAD_SQL: list[tuple[str, str]] = [
    # -- stocks: 2-way joins with skewed join keys
    ("q01_stocks_top",
     "SELECT c.company, t.shares FROM company AS c, trades AS t "
     "WHERE c.symbol = 'APPL' AND c.id = t.company_id"),
    ("q02_stocks_cold",
     "SELECT c.company, t.shares FROM company AS c, trades AS t "
     "WHERE c.symbol = 'BMJ' AND c.id = t.company_id"),
    ("q03_stocks_pair",
     "SELECT MIN(t.shares) FROM company AS c, trades AS t "
     "WHERE c.symbol IN ('APPL', 'GOOG') AND c.id = t.company_id"),
    ("q04_stocks_prefix",
     "SELECT c.symbol, t.shares FROM company AS c, trades AS t "
     "WHERE c.symbol LIKE 'AA%' AND c.id = t.company_id AND t.shares > 9000"),
    # -- employees: correlated predicates
    ("q05_emp_corr",
     "SELECT e.id, d.region FROM employees AS e, departments AS d "
     "WHERE e.age > 52 AND e.salary > 130000 AND e.dept_id = d.id"),
    ("q06_emp_corr_proj",
     "SELECT MIN(p.budget) FROM employees AS e, departments AS d, projects AS p "
     "WHERE e.age > 55 AND e.salary > 140000 AND e.dept_id = d.id AND p.dept_id = d.id"),
    ("q07_emp_assign",
     "SELECT e.id, p.budget FROM assignments AS a, employees AS e, projects AS p "
     "WHERE a.emp_id = e.id AND a.proj_id = p.id AND e.age < 30 AND e.salary > 100000"),
    ("q08_emp_4way",
     "SELECT MIN(a.hours) FROM assignments AS a, employees AS e, projects AS p, departments AS d "
     "WHERE a.emp_id = e.id AND a.proj_id = p.id AND e.dept_id = d.id "
     "AND e.age > 50 AND e.salary > 120000 AND p.budget > 1500000"),
    ("q09_emp_min",
     "SELECT MIN(e.salary) FROM employees AS e, departments AS d "
     "WHERE e.age > 60 AND e.dept_id = d.id AND d.region = 'north'"),
    ("q10_emp_young",
     "SELECT e.id, e.salary FROM employees AS e, departments AS d "
     "WHERE e.age < 25 AND e.salary > 150000 AND e.dept_id = d.id"),
    # -- chain: join-crossing correlation
    ("q11_chain_hot3",
     "SELECT m.id, t.kind FROM head AS h, mid AS m, tail AS t "
     "WHERE h.category = 'hot' AND h.id = m.head_id AND m.id = t.mid_id"),
    ("q12_chain_cold3",
     "SELECT MIN(t.id) FROM head AS h, mid AS m, tail AS t "
     "WHERE h.category = 'cold' AND h.id = m.head_id AND m.id = t.mid_id"),
    ("q13_chain_hot4",
     "SELECT MIN(l.score) FROM head AS h, mid AS m, tail AS t, leaf AS l "
     "WHERE h.category = 'hot' AND h.id = m.head_id AND m.id = t.mid_id AND t.id = l.tail_id"),
    ("q14_chain_kind",
     "SELECT t.id, l.score FROM head AS h, mid AS m, tail AS t, leaf AS l "
     "WHERE h.category = 'hot' AND t.kind = 'x' AND h.id = m.head_id "
     "AND m.id = t.mid_id AND t.id = l.tail_id"),
    ("q15_chain_score",
     "SELECT MIN(t.id) FROM head AS h, mid AS m, tail AS t, leaf AS l "
     "WHERE h.category = 'hot' AND l.score < 50 AND h.id = m.head_id "
     "AND m.id = t.mid_id AND t.id = l.tail_id"),
    ("q16_chain_cold4",
     "SELECT MIN(l.score) FROM head AS h, mid AS m, tail AS t, leaf AS l "
     "WHERE h.category = 'cold' AND l.score > 990 AND h.id = m.head_id "
     "AND m.id = t.mid_id AND t.id = l.tail_id"),
    # -- star/snowflake: compounding skew, popular dimension members
    ("q17_star_strong_pair",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND s1.v < 20 AND s2.v < 20"),
    ("q18_star_mild_pair",
     "SELECT MIN(s4.v) FROM hub AS b, sat4 AS s4, sat5 AS s5 "
     "WHERE b.id = s4.hub_id AND b.id = s5.hub_id AND s4.v < 40 AND s5.v < 40"),
    ("q19_star_triple",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2, sat3 AS s3 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND b.id = s3.hub_id "
     "AND s1.v < 20 AND s2.v < 20 AND s3.v < 40"),
    ("q20_star_dim_popular",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, dim1 AS d1 "
     "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id "
     "AND d1.name IN ('kw1_00001', 'kw1_00002', 'kw1_00003')"),
    ("q21_star_dim_rare",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, dim1 AS d1 "
     "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id "
     "AND d1.name IN ('kw1_00797', 'kw1_00811', 'kw1_00850')"),
    ("q22_star_deep5",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2, sat4 AS s4, sat5 AS s5 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND b.id = s4.hub_id AND b.id = s5.hub_id "
     "AND s1.v < 15 AND s2.v < 15 AND s4.v < 30 AND s5.v < 30"),
    ("q23_star_deep6",
     "SELECT MIN(s3.v) FROM hub AS b, sat1 AS s1, sat3 AS s3, sat4 AS s4, sat5 AS s5, sat6 AS s6 "
     "WHERE b.id = s1.hub_id AND b.id = s3.hub_id AND b.id = s4.hub_id "
     "AND b.id = s5.hub_id AND b.id = s6.hub_id "
     "AND s1.v < 12 AND s3.v < 25 AND s4.v < 25 AND s5.v < 25 AND s6.v < 40"),
    ("q24_star_snow4",
     "SELECT MIN(d2.weight) FROM hub AS b, sat2 AS s2, dim2 AS d2, sat4 AS s4 "
     "WHERE b.id = s2.hub_id AND s2.dim_id = d2.id AND b.id = s4.hub_id "
     "AND d2.weight < 100 AND s4.v < 30"),
    ("q25_star_snow5",
     "SELECT MIN(d1.weight) FROM hub AS b, sat1 AS s1, dim1 AS d1, sat2 AS s2, dim2 AS d2 "
     "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id AND b.id = s2.hub_id AND s2.dim_id = d2.id "
     "AND d1.name IN ('kw1_00001', 'kw1_00002') AND d2.weight < 150"),
    ("q26_star_snow5_flip",
     "SELECT MIN(d2.weight) FROM hub AS b, sat2 AS s2, dim2 AS d2, sat1 AS s1, dim1 AS d1 "
     "WHERE b.id = s2.hub_id AND s2.dim_id = d2.id AND b.id = s1.hub_id AND s1.dim_id = d1.id "
     "AND d2.name IN ('kw2_00001', 'kw2_00002', 'kw2_00003') AND d1.weight < 120"),
    ("q27_star_code",
     "SELECT s1.v, s2.v FROM hub AS b, sat1 AS s1, sat2 AS s2 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND b.code LIKE 'H0000%' "
     "AND s1.v < 50 AND s2.v < 50"),
    ("q28_star_mixed4",
     "SELECT MIN(s2.v) FROM hub AS b, sat2 AS s2, sat3 AS s3, sat6 AS s6 "
     "WHERE b.id = s2.hub_id AND b.id = s3.hub_id AND b.id = s6.hub_id "
     "AND s2.v < 20 AND s3.v < 30 AND s6.v < 50"),
    ("q29_star_dim_weight",
     "SELECT MIN(s3.v) FROM hub AS b, sat3 AS s3, dim3 AS d3 "
     "WHERE b.id = s3.hub_id AND s3.dim_id = d3.id AND d3.weight > 950"),
    ("q30_star_deep7",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2, sat3 AS s3, sat4 AS s4, "
     "sat5 AS s5, sat6 AS s6 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND b.id = s3.hub_id AND b.id = s4.hub_id "
     "AND b.id = s5.hub_id AND b.id = s6.hub_id "
     "AND s1.v < 10 AND s2.v < 10 AND s3.v < 20 AND s4.v < 20 AND s5.v < 30 AND s6.v < 30"),
    ("q31_star_snow7",
     "SELECT MIN(d5.weight) FROM hub AS b, sat1 AS s1, dim1 AS d1, sat2 AS s2, dim2 AS d2, "
     "sat5 AS s5, dim5 AS d5 "
     "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id AND b.id = s2.hub_id AND s2.dim_id = d2.id "
     "AND b.id = s5.hub_id AND s5.dim_id = d5.id "
     "AND d1.name IN ('kw1_00001', 'kw1_00004') AND d2.weight < 120 AND d5.weight < 200"),
    ("q32_star_hub_point",
     "SELECT s1.v FROM hub AS b, sat1 AS s1 WHERE b.id = s1.hub_id AND b.code = 'H00005'"),
    ("q33_star_strong_cold",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND s1.v > 95 AND s2.v > 95"),
    ("q34_star_tag",
     "SELECT MIN(s5.v) FROM hub AS b, sat5 AS s5, dim5 AS d5 "
     "WHERE b.id = s5.hub_id AND s5.dim_id = d5.id AND d5.name LIKE 'kw5_0000%'"),
    ("q35_star_two_dims",
     "SELECT MIN(s2.v) FROM hub AS b, sat2 AS s2, dim2 AS d2, sat3 AS s3, dim3 AS d3 "
     "WHERE b.id = s2.hub_id AND s2.dim_id = d2.id AND b.id = s3.hub_id AND s3.dim_id = d3.id "
     "AND d2.weight < 80 AND d3.weight < 80 AND s2.v < 25"),
    ("q36_star_medium",
     "SELECT MIN(s3.v) FROM hub AS b, sat3 AS s3, sat5 AS s5 "
     "WHERE b.id = s3.hub_id AND b.id = s5.hub_id AND s3.v < 15 AND s5.v < 15"),
    ("q37_star_snow_deep",
     "SELECT MIN(s2.v) FROM hub AS b, sat2 AS s2, dim2 AS d2, sat1 AS s1, dim1 AS d1, sat6 AS s6 "
     "WHERE b.id = s2.hub_id AND s2.dim_id = d2.id AND b.id = s1.hub_id AND s1.dim_id = d1.id "
     "AND b.id = s6.hub_id "
     "AND d2.name IN ('kw2_00001', 'kw2_00002', 'kw2_00005') AND d1.weight < 100 AND s6.v < 40"),
    ("q38_star_cross",
     "SELECT MIN(s4.v) FROM hub AS b, sat4 AS s4, dim4 AS d4, sat5 AS s5 "
     "WHERE b.id = s4.hub_id AND s4.dim_id = d4.id AND b.id = s5.hub_id "
     "AND d4.weight > 900 AND s5.v < 20"),
    ("q39_chain_deep_hot",
     "SELECT MIN(l.score) FROM head AS h, mid AS m, tail AS t, leaf AS l "
     "WHERE h.category = 'hot' AND t.kind = 'y' AND l.score < 200 "
     "AND h.id = m.head_id AND m.id = t.mid_id AND t.id = l.tail_id"),
    ("q40_star_all_hot",
     "SELECT MIN(s1.v) FROM hub AS b, sat1 AS s1, sat2 AS s2, sat3 AS s3 "
     "WHERE b.id = s1.hub_id AND b.id = s2.hub_id AND b.id = s3.hub_id "
     "AND s1.v < 10 AND s2.v < 10 AND s3.v < 10"),
]


def build_corpus(seed: int = 7, scale: float = 1.0) -> tuple[Catalog, list[tuple[str, QuerySpec]]]:
    """Generate all four datasets and parse the workload against them."""
    catalog = Catalog()
    for spec in corpus_specs(seed, scale):
        generate(spec, catalog)
    workload = [(qid, parse(sql, catalog)) for qid, sql in WORKLOAD_SQL]
    return catalog, workload
