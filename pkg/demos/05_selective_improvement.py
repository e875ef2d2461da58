"""Correcting estimates one at a time can backfire.

The loop repeatedly executes a query, pins the lowest mis-estimated
operator's cardinality (and everything below it) to truth, and
re-optimizes. Fixing a subset of estimates shifts the cost landscape:
mid-loop the optimizer can flee to an order whose own estimates are
still wrong and pick a plan several times slower, before enough truth
accumulates to settle on a good plan.
"""
from reopt_lab import Catalog, Estimator, analyze_catalog
from reopt_lab.reopt import selective_improvement
from reopt_lab.sql import parse
from reopt_lab.workload import GeneratorSpec, generate

catalog = Catalog()
generate(GeneratorSpec("star", {"hub": 4000, "dims": 900}, seed=10), catalog)
stats = analyze_catalog(catalog)

SQL = (
    "SELECT MIN(d1.weight) FROM hub AS b, sat1 AS s1, dim1 AS d1, sat2 AS s2, dim2 AS d2 "
    "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id AND b.id = s2.hub_id AND s2.dim_id = d2.id "
    "AND d1.name IN ('kw1_00001', 'kw1_00002') AND d2.weight < 150"
)
spec = parse(SQL, catalog)

curve = selective_improvement(spec, 32.0, Estimator(catalog, stats))

times = curve.execution_times
worst = max(times)
print("execution time per correction iteration:")
for i, (iteration, exec_us, corrected) in enumerate(curve.iterations):
    bar = "#" * round(40 * exec_us / worst)
    note = f" corrected: {corrected}" if corrected else "  (converged)"
    print(f"  it{iteration:02d} {bar} {exec_us} us{note}")

ups = [(times[i], times[i + 1]) for i in range(len(times) - 1) if times[i + 1] >= 1.5 * times[i]]
if ups:
    a, b = ups[0]
    print(f"\nnon-monotone step: {a} us -> {b} us ({b / a:.1f}x slower after a correction)")
