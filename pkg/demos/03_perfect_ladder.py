"""How good do estimates have to get before plans improve?

perfect-(n) answers every cardinality request over n or fewer relations
from a truth oracle and composes oracle factors into the default formula
above that. Most of the workload's pain sits in deep joins, so small n
buys almost nothing; the drop arrives once the mis-estimated
intermediates themselves are covered.
"""
from reopt_lab.bench import Bench, ladder_to_csv, perfect_ladder
from reopt_lab.stats import analyze_catalog
from reopt_lab.workload import build_corpus

catalog, workload = build_corpus(seed=7, scale=0.5)
stats = analyze_catalog(catalog)
bench = Bench(catalog, stats)

rows = perfect_ladder(workload, [0, 1, 2, 3, 4, "max"], bench)
print(ladder_to_csv(rows))

base = rows[0]["execution_us"]
print("execution relative to perfect-(0):")
for r in rows:
    bar = "#" * round(40 * r["execution_us"] / base)
    print(f"  n={str(r['n']):>3s} {bar} {r['execution_us'] / base:.2f}")
