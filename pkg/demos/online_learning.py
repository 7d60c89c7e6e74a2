"""Learning the label distribution while labeling.

A stream of 6k objects is drawn from a skewed hidden distribution over a
300-node tree. Online mode starts from equal weights, counts every resolved
label, and re-weights each new session; the windowed mean question count
slides down toward what a fully informed policy achieves.
"""

import numpy as np

from hiersearch.distributions import DistributionSpec, generate
from hiersearch.dtree import build_decision_tree, expected_cost
from hiersearch.evaluation import batch_evaluate
from hiersearch.generators import random_tree, sample_targets

h = random_tree(300, np.random.default_rng(3), max_children=4)
hidden = generate(DistributionSpec("zipf", a=2.0, seed=11), h.labels)
stream = sample_targets(hidden, 6000, np.random.default_rng(7)).tolist()

equal = np.full(h.n, 1.0 / h.n)
uninformed = expected_cost(build_decision_tree(h, equal, "greedy_tree"), hidden)
informed = expected_cost(build_decision_tree(h, hidden, "greedy_tree"), hidden)
print(f"expected questions if the distribution were ignored: {uninformed:.2f}")
print(f"expected questions if it were known exactly:         {informed:.2f}")

report = batch_evaluate(h, equal, "greedy_tree", targets=stream,
                        online=True, window=200)
print("\nonline mean questions per 200-object window:")
for i, m in enumerate(report.window_means[:10]):
    bar = "#" * int(round(m * 10))
    print(f"  window {i + 1:2d}: {m:5.2f}  {bar}")
tail = float(np.mean(report.window_means[10:]))
print(f"  ...\nmean over the remaining windows: {tail:.2f}"
      f" (informed baseline {informed:.2f})")
