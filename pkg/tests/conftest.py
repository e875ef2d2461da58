import pytest

from reopt_lab.bench import Bench
from reopt_lab.stats import analyze_catalog
from reopt_lab.storage import Catalog, ColumnMeta, ColumnType, Table
from reopt_lab.workload import GeneratorSpec, build_corpus, generate

INT64 = ColumnType.INT64
TEXT = ColumnType.TEXT


def col(name, ctype=INT64, pk=False):
    return ColumnMeta(name, ctype, is_primary_key=pk)


@pytest.fixture
def tiny_catalog():
    """Three toy relations forming a chain: a -(x)- b -(y)- c."""
    catalog = Catalog()
    catalog.register(
        Table("ta", [col("id", pk=True), col("x")], [(1, 10), (2, 20), (3, 30), (4, 20)])
    )
    catalog.register(
        Table(
            "tb",
            [col("id", pk=True), col("x"), col("y"), col("tag", TEXT)],
            [
                (1, 10, 100, "red"),
                (2, 20, 100, "blue"),
                (3, 20, 200, "red"),
                (4, 30, 200, "red"),
                (5, 99, 300, "green"),
            ],
        )
    )
    catalog.register(
        Table("tc", [col("id", pk=True), col("y")], [(1, 100), (2, 200), (3, 200), (4, 400)])
    )
    return catalog


@pytest.fixture
def tiny_stats(tiny_catalog):
    return analyze_catalog(tiny_catalog)


@pytest.fixture(scope="session")
def small_corpus():
    """Scaled-down corpus for integration tests: fast, same pathologies."""
    catalog, workload = build_corpus(seed=7, scale=0.15)
    stats = analyze_catalog(catalog)
    return catalog, workload, stats


@pytest.fixture(scope="session")
def corpus():
    """The full acceptance corpus (seed 7) with a shared oracle."""
    catalog, workload = build_corpus(seed=7, scale=1.0)
    stats = analyze_catalog(catalog)
    bench = Bench(catalog, stats)
    return catalog, workload, stats, bench


@pytest.fixture(scope="session")
def oracle_fixture():
    """10^3-row-scale fixture for brute-force oracle cross-checks."""
    catalog = Catalog()
    generate(GeneratorSpec("stocks", {"companies": 200, "trades": 1500}, zipf_s=1.1, seed=11), catalog)
    generate(
        GeneratorSpec(
            "employees",
            {"departments": 10, "employees": 1200, "projects": 60, "assignments": 2000},
            correlation_rho=0.8,
            seed=12,
        ),
        catalog,
    )
    generate(
        GeneratorSpec(
            "chain",
            {
                "head": 200,
                "mid": 1000,
                "hot_heads": 5,
                "tail_fanout_hot": 20,
                "leaf_fanout_hot": 2,
            },
            seed=13,
        ),
        catalog,
    )
    stats = analyze_catalog(catalog)
    return catalog, stats
