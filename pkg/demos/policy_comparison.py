"""How close greedy lands to the exact optimum, and what that costs in time.

Small random trees allow the exact exponential DP as a reference; the
runtime probe then shows why the cached policies matter once hierarchies
stop being small.
"""

import numpy as np

from hiersearch.distributions import DistributionSpec, generate
from hiersearch.dtree import build_decision_tree, expected_cost, optimal_expected_cost
from hiersearch.evaluation import runtime_probe
from hiersearch.generators import random_dag, random_tree

# Greedy vs. exact optimum over 30 small random trees, three skew levels.
print("greedy vs. exact optimum (expected questions):")
print(f"  {'distribution':13s} {'greedy':>7s} {'optimal':>8s} {'ratio':>6s}")
for kind, a in (("equal", None), ("uniform", None), ("zipf", 2.0)):
    ratios, g_mean, o_mean = [], [], []
    for seed in range(30):
        h = random_tree(10, np.random.default_rng(seed), max_children=3)
        p = generate(DistributionSpec(kind, a=a, seed=seed), h.labels) \
            if kind != "equal" else np.full(h.n, 1.0 / h.n)
        g = expected_cost(build_decision_tree(h, p, "greedy_tree"), p)
        o = optimal_expected_cost(h, p)
        ratios.append(g / o if o else 1.0)
        g_mean.append(g)
        o_mean.append(o)
    label = kind if a is None else f"{kind}(a={a})"
    print(f"  {label:13s} {np.mean(g_mean):7.3f} {np.mean(o_mean):8.3f}"
          f" {max(ratios):6.3f}")
print("  (ratio column is the worst case over 30 trees; 1.0 = optimal)")

# Wall time per search at n=2000: the cached policies vs. the rescans.
n = 2000
h = random_tree(n, np.random.default_rng(1), max_children=4)
p = generate(DistributionSpec("uniform", seed=1), h.labels)
probe = runtime_probe(h, p, ("greedy_naive", "greedy_tree"),
                      targets_per_depth=2, repetitions=3)
print(f"\nmean seconds per search, random tree n={n}:")
for kind in ("greedy_naive", "greedy_tree"):
    print(f"  {kind:13s} {probe.mean_seconds(kind):.5f}")

hd = random_dag(n, np.random.default_rng(2), max_children=4)
pd = generate(DistributionSpec("uniform", seed=2), hd.labels)
probe = runtime_probe(hd, pd, ("greedy_naive", "greedy_dag"),
                      targets_per_depth=2, repetitions=3)
print(f"mean seconds per search, random DAG n={n}:")
for kind in ("greedy_naive", "greedy_dag"):
    print(f"  {kind:13s} {probe.mean_seconds(kind):.5f}")
