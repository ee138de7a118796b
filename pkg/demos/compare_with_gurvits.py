"""Coherent-state sampling versus Gurvits' estimator on rank-one matrices.

The family ``U diag(0.9, 0, ..., 0) U^H`` sits in the S1 regime from M = 3
on. There the coherent-state estimator promises an error of
``eps (l lambda_max)^M`` with ``l < 1``, while Gurvits' estimator promises
``eps lambda_max^M``. Both run at the same (eps, delta) and the achieved
errors are measured against Ryser's exact permanent.
"""

from permest.bench import format_table, run_bench

rows = run_bench(range(2, 11), family="rank-one", lambda_max=0.9, epsilon=0.1, delta=0.05, seed=0)
print(format_table(rows))

print()
for r in rows:
    if r["s1"]:
        ratio = r["cs_budget"] / r["gurvits_budget"]
        print(f"M = {r['m']:2d}: coherent-state budget is {ratio:.2e} of Gurvits' budget")
