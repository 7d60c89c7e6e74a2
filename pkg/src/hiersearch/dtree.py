"""Decision trees induced by question policies, and their expected costs.

Running a policy to resolution for every possible target traces out a
binary decision tree: internal nodes are questions, the yes branch keeps
the question's reachable set, the no branch drops it, and each hierarchy
node ends up at exactly one leaf.  Expected cost weights each leaf's path
length (or path price) by the leaf's target probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, BadParameter, LeafMismatch, TooLarge
from .policies import apply_answer, new_search, next_question

OPTIMAL_NODE_LIMIT = 16


@dataclass
class DecisionTree:
    """Binary question tree; leaves carry `target`, internal nodes `query`."""

    query: int | None = None
    target: int | None = None
    yes: "DecisionTree | None" = None
    no: "DecisionTree | None" = None

    def is_leaf(self) -> bool:
        return self.query is None

    def leaf_count(self) -> int:
        return sum(1 for _ in self.iter_leaves())

    def height(self) -> int:
        depth = 0
        for _, d in self.iter_leaves():
            depth = max(depth, d)
        return depth

    def iter_leaves(self):
        """Yield (leaf, depth) over all leaves."""
        stack = [(self, 0)]
        while stack:
            node, d = stack.pop()
            if node.is_leaf():
                yield node, d
            else:
                stack.append((node.no, d + 1))
                stack.append((node.yes, d + 1))

    def leaf_depths(self) -> dict[int, int]:
        return {leaf.target: d for leaf, d in self.iter_leaves()}

    def leaf_prices(self, costs) -> dict[int, float]:
        """Total question price along the path to each leaf."""
        out: dict[int, float] = {}
        stack = [(self, 0.0)]
        while stack:
            node, acc = stack.pop()
            if node.is_leaf():
                out[node.target] = acc
            else:
                step = acc + float(costs[node.query])
                stack.append((node.no, step))
                stack.append((node.yes, step))
        return out


def build_decision_tree(h, weights, kind: str = "greedy_tree", costs=None,
                        rounded: bool | None = None, policy=None) -> DecisionTree:
    """Expand a policy into its full decision tree over the hierarchy."""
    root_state = new_search(h, weights, kind, costs=costs, rounded=rounded,
                            policy=policy)
    root = DecisionTree()
    stack = [(root_state, root)]
    while stack:
        state, node = stack.pop()
        if state.view.live_count == 1:
            node.target = int(state.view.root)
            continue
        q = next_question(state)
        node.query = q.node
        node.yes = DecisionTree()
        node.no = DecisionTree()
        yes_state = state.copy()
        apply_answer(yes_state, q, True)
        apply_answer(state, q, False)
        stack.append((yes_state, node.yes))
        stack.append((state, node.no))
    return root


def _leaf_check(tree: DecisionTree, n: int) -> None:
    targets = sorted(tree.leaf_depths().keys())
    if targets != list(range(n)):
        raise LeafMismatch(
            f"decision tree has {len(targets)} leaves over {n} hierarchy nodes")


def expected_cost(tree: DecisionTree, weights) -> float:
    """Probability-weighted mean number of questions to reach a leaf."""
    p = np.asarray(weights, dtype=np.float64)
    _leaf_check(tree, p.size)
    depths = tree.leaf_depths()
    total = p.sum()
    if total <= 0:
        raise AllZero("all leaf weights are zero")
    return float(sum(p[v] * d for v, d in depths.items()) / total)


def expected_cost_sensitive(tree: DecisionTree, weights, costs) -> float:
    """Probability-weighted mean total question price to reach a leaf."""
    p = np.asarray(weights, dtype=np.float64)
    c = np.asarray(costs, dtype=np.float64)
    if c.shape != p.shape:
        raise BadParameter("weights and costs must align")
    _leaf_check(tree, p.size)
    prices = tree.leaf_prices(c)
    total = p.sum()
    if total <= 0:
        raise AllZero("all leaf weights are zero")
    return float(sum(p[v] * prices[v] for v in prices) / total)


def to_dot(tree: DecisionTree, labels: list[str]) -> str:
    """Graphviz rendering; yes edges solid, no edges dashed."""
    lines = ["digraph decision_tree {", "  node [fontname=Helvetica];"]
    counter = [0]

    def emit(node) -> int:
        nid = counter[0]
        counter[0] += 1
        if node.is_leaf():
            lines.append(f'  v{nid} [shape=box, label="{labels[node.target]}"];')
            return nid
        lines.append(f'  v{nid} [shape=ellipse, label="{labels[node.query]}?"];')
        yid = emit(node.yes)
        nid_no = emit(node.no)
        lines.append(f'  v{nid} -> v{yid} [label="yes"];')
        lines.append(f'  v{nid} -> v{nid_no} [label="no", style=dashed];')
        return nid

    emit(tree)
    lines.append("}")
    return "\n".join(lines)


def reach_bitmasks(h) -> list[int]:
    """Reachable set of every node as a bitmask, from the full graph."""
    masks = [1 << v for v in range(h.n)]
    for v in reversed(h.topo_order):
        mv = masks[v]
        for c in h.children[v]:
            mv |= masks[c]
        masks[v] = mv
    return masks


def optimal_expected_cost(h, weights, costs=None,
                          limit: int = OPTIMAL_NODE_LIMIT) -> float:
    """Exact minimum expected cost over all question strategies.

    Exhaustive dynamic programming over live candidate sets as bitmasks.
    Questions range over every node whose reachable set splits the
    candidates: on trees only live nodes ever do, but on shared-sink
    graphs an already excluded node can still separate the live set, so
    restricting to live questions would overstate the optimum.
    Exponential in the worst case, so refuses hierarchies with more than
    `limit` nodes.
    """
    n = h.n
    if n > limit:
        raise TooLarge(f"exact optimum is limited to {limit} nodes, got {n}")
    p = np.asarray(weights, dtype=np.float64)
    if p.shape != (n,):
        raise BadParameter(f"weights must have length {n}")
    c = None
    if costs is not None:
        c = np.asarray(costs, dtype=np.float64)
        if c.shape != (n,):
            raise BadParameter(f"costs must have length {n}")
    reach = reach_bitmasks(h)
    plist = p.tolist()
    clist = c.tolist() if c is not None else None

    pmass: dict[int, float] = {0: 0.0}

    def mass(mask: int) -> float:
        got = pmass.get(mask)
        if got is not None:
            return got
        low = mask & (-mask)
        val = plist[low.bit_length() - 1] + mass(mask ^ low)
        pmass[mask] = val
        return val

    memo: dict[int, float] = {}

    def best(mask: int) -> float:
        if mask & (mask - 1) == 0:
            return 0.0
        got = memo.get(mask)
        if got is not None:
            return got
        val = float("inf")
        for q in range(n):
            yes_mask = mask & reach[q]
            if yes_mask == mask or yes_mask == 0:
                continue
            price = 1.0 if clist is None else clist[q]
            cand = price * mass(mask) + best(yes_mask) + best(mask & ~reach[q])
            if cand < val:
                val = cand
        memo[mask] = val
        return val

    full = (1 << n) - 1
    total = mass(full)
    if total <= 0:
        raise AllZero("all weights are zero")
    return best(full) / total
