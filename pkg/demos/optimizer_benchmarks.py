"""Exercise the annealed evolutionary optimizer on the classic test set.

A quick pass (few runs, reduced budget) over every problem in the suite,
then a Lennard-Jones tetrahedron solved from scratch with the default
class settings.

The full acceptance-scale table (30 runs, 200k evaluations) is what
`stericzip bench --suite classic --runs 30 --seed 0` produces.

Run:  python demos/optimizer_benchmarks.py
"""

import numpy as np

from stericzip import OptimizerConfig, minimize_saec, run_benchmark, uniform_bounds
from stericzip.benchmarks import default_bench_config, lj_cluster_value
from stericzip.optimize import Objective

report = run_benchmark(
    "classic", dims=(2, 5), runs=3, config=default_bench_config(60_000), seed=0
)
print(f"suite {report['suite']}, {report['runs']} runs per cell, budget {report['max_evaluations']}")
for cell in report["cells"]:
    status = "ok " if cell["passed"] else "LOW"
    print(
        f"  {status} {cell['problem']:>14} n={cell['dim']:<3} "
        f"rate {cell['success_rate']:.2f}  best {cell['best']:.2e}  "
        f"median evals {cell['median_evals']:.0f}"
    )

print("\nLJ tetrahedron from scratch (12 variables, reduced units):")
objective = Objective(
    dimension=12,
    evaluate=lambda x: float(lj_cluster_value(x)),
    evaluate_batch=lj_cluster_value,
    bounds=uniform_bounds(-2.0, 2.0, 12),
)
result = minimize_saec(
    objective,
    OptimizerConfig(max_evaluations=60_000, seed=1, target_value=-6.0, target_tolerance=1e-3),
)
pts = result.best_point.reshape(4, 3)
edges = sorted(
    float(np.linalg.norm(pts[i] - pts[j])) for i in range(4) for j in range(i + 1, 4)
)
print(f"  best energy {result.best_value:.6f} after {result.evaluations_used} evaluations")
print(f"  edge lengths: {['%.4f' % e for e in edges]} (optimum 2^(1/6) = {2**(1/6):.4f})")
