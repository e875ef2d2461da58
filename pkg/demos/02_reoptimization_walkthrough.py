"""Mid-query re-optimization, step by step.

A snowflake query picks up a popular dimension IN-list; the optimizer
underestimates the dimension join ~50x and defers the other dimension
filter, exploding an intermediate. The driver catches the Q-error at the
lowest join, materializes that subtree as a temp table with exact
statistics, rewrites the residual query against it, and re-plans.
"""
from reopt_lab import Catalog, Estimator, analyze_catalog
from reopt_lab.executor import execute, explain_analyze
from reopt_lab.optimizer import optimize
from reopt_lab.reopt import ReoptConfig, run_with_reopt
from reopt_lab.sql import parse, render
from reopt_lab.workload import GeneratorSpec, generate

catalog = Catalog()
generate(GeneratorSpec("star", {"hub": 2000, "dims": 900}, seed=7), catalog)
stats = analyze_catalog(catalog)

SQL = (
    "SELECT MIN(d1.weight) FROM hub AS b, sat1 AS s1, dim1 AS d1, sat2 AS s2, dim2 AS d2 "
    "WHERE b.id = s1.hub_id AND s1.dim_id = d1.id AND b.id = s2.hub_id AND s2.dim_id = d2.id "
    "AND d1.name IN ('kw1_00001', 'kw1_00002') AND d2.weight < 150"
)
spec = parse(SQL, catalog)

print("original query:")
print(" ", render(spec))
print()
plan, _ = optimize(spec, Estimator(catalog, stats))
result = execute(plan, catalog)
print(f"default plan (execution {result.execution_time_us} us):")
print(explain_analyze(plan, result))
print()

result, trace = run_with_reopt(spec, Estimator(catalog, stats), ReoptConfig(threshold=32))
for i, r in enumerate(trace.rounds, 1):
    print(f"round {i}: {r.node_op} over {r.node_rels} estimated {r.est_rows:.0f} rows, "
          f"saw {r.actual_rows} (Q-error {r.qerror:.0f})")
    print(f"  materialized {r.temp_name} with {r.temp_rows} rows in {r.creation_us} us")
    print(f"  residual query: {r.replanned_sql}")
print()
print(f"final plan after re-optimization (total execution {trace.total_execution_us} us,"
      f" planning {trace.total_planning_us} us):")
print(trace.final_plan)
