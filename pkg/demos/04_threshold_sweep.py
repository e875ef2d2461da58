"""Where should the re-optimization trigger sit?

Sweeping the Q-error threshold trades planning time (every round
re-plans the residual query) against execution time (rounds rescue bad
plans). Low thresholds re-optimize eagerly and still barely hurt; an
infinite threshold never triggers and reproduces the default behavior.
"""
import math

from reopt_lab import Estimator, analyze_catalog
from reopt_lab.reopt import sweep_to_csv, threshold_sweep
from reopt_lab.workload import build_corpus

catalog, workload = build_corpus(seed=7, scale=0.5)
stats = analyze_catalog(catalog)

rows = threshold_sweep(workload, [2, 4, 8, 16, 32, 64, math.inf], Estimator(catalog, stats))
print(sweep_to_csv(rows))

worst = max(r["execution_us"] for r in rows)
print("execution time by threshold (re-optimization rounds in parentheses):")
for r in rows:
    label = "inf" if math.isinf(r["threshold"]) else f"{r['threshold']:g}"
    bar = "#" * round(40 * r["execution_us"] / worst)
    print(f"  t={label:>4s} {bar} ({r['reopt_rounds']} rounds)")
