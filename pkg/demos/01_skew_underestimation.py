"""Skewed join keys fool the uniformity assumption.

A company table joined by a Zipf-distributed trades table: the estimator
nails the filtered company row count (one row for symbol 'APPL'), then
assumes that company trades like any other. The hot symbol's true trade
count lands two orders of magnitude above the estimate.
"""
from reopt_lab import Catalog, Estimator, analyze_catalog, request_for
from reopt_lab.executor import execute, explain_analyze
from reopt_lab.optimizer import optimize
from reopt_lab.sql import parse
from reopt_lab.workload import GeneratorSpec, generate

catalog = Catalog()
generate(GeneratorSpec("stocks", {"companies": 1000, "trades": 60_000}, zipf_s=1.1, seed=7), catalog)
stats = analyze_catalog(catalog)
estimator = Estimator(catalog, stats)

SQL = (
    "SELECT c.company, t.shares FROM company AS c, trades AS t "
    "WHERE c.symbol = 'APPL' AND c.id = t.company_id"
)
spec = parse(SQL, catalog)

for symbol in ("APPL", "BMJ"):
    q = SQL.replace("'APPL'", f"'{symbol}'")
    s = parse(q, catalog)
    est = Estimator(catalog, stats).estimate(request_for(s, {"c", "t"}))
    plan, _ = optimize(s, Estimator(catalog, stats))
    actual = len(execute(plan, catalog).rows)
    flavor = "hot, Zipf head" if symbol == "APPL" else "cold, Zipf tail"
    print(f"symbol {symbol:5s} ({flavor:15s}): estimated {est:8.1f} rows, actual {actual:6d}"
          f"  -> error {max(actual, 1) / est:.0f}x")

print()
print("The plan, with estimates and actuals side by side:")
plan, _ = optimize(spec, estimator)
print(explain_analyze(plan, execute(plan, catalog)))
