"""The running vehicle example, end to end.

Seven categories, two of them (Maxima, Sentra) carrying 80% of the labeled
objects. Walks one search question by question, then compares policies and
replays two scripted question orders over the historical object tally.
"""

import numpy as np

from hiersearch import datasets
from hiersearch.evaluation import batch_evaluate, replay_strategy
from hiersearch.policies import apply_answer, make_oracle, new_search, next_question

h = datasets.vehicle()
p = datasets.vehicle_real_weights(h)

print("hierarchy:")
for v in range(h.n):
    kids = ", ".join(h.labels[c] for c in h.children[v]) or "-"
    print(f"  {h.labels[v]:9s} p={p[v]:.2f}  children: {kids}")

# One interactive session, simulated oracle standing in for the human.
target = h.id_of("Sentra")
oracle = make_oracle(h, target)
state = new_search(h, p, "greedy_tree")
print(f"\nsearching for {h.labels[target]} with greedy_tree:")
while state.view.live_count > 1:
    q = next_question(state)
    ans = oracle(q.node)
    apply_answer(state, q, ans)
    print(f"  under {h.labels[q.node]!r}? {'yes' if ans else 'no':3s}"
          f"  (candidates left: {state.view.live_count})")
print(f"  label: {h.labels[state.view.root]}")

# Expected cost per policy under the real distribution vs. equal weights.
equal = np.full(h.n, 1.0 / h.n)
print("\nexpected questions per object:")
print(f"  {'policy':13s} {'real':>6s} {'equal':>6s}")
for kind in ("top_down", "greedy_naive", "greedy_tree"):
    real = batch_evaluate(h, p, kind).expected_cost
    eq = batch_evaluate(h, equal, kind).expected_cost
    print(f"  {kind:13s} {real:6.2f} {eq:6.2f}")

# Two historical hand-written strategies over 100 labeled objects: asking
# broad categories first loses to asking the two popular leaves first.
for name, order in (("broad-first", datasets.VEHICLE_STRATEGY_BROAD),
                    ("leaf-first", datasets.VEHICLE_STRATEGY_LEAF)):
    per_cat, total = replay_strategy(h, p, order, datasets.VEHICLE_COUNTS)
    print(f"\n{name} strategy: {total} questions for 100 objects")
    print("  " + "  ".join(f"{lab}:{per_cat[lab]}" for lab in h.labels))
