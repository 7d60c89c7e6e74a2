"""Independent reference implementations the library is checked against.

Everything here is deliberately written the slow, obvious way (python sets
and dicts, no shared code with the package internals) so tests compare two
independent routes to the same numbers.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def ref_reach(h, live: set[int], u: int) -> set[int]:
    """Reachable live set of u via live nodes, plain set BFS."""
    seen = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for v in frontier:
            for c in h.children[v]:
                if c in live and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


def ref_balances(h, live: set[int], root: int, weights) -> dict[int, float]:
    """Balance |2 w(G_u) - w(G)| for every live non-root candidate."""
    total = sum(weights[v] for v in live)
    out = {}
    for u in sorted(live):
        if u == root:
            continue
        ru = sum(weights[v] for v in ref_reach(h, live, u))
        out[u] = abs(2 * ru - total)
    return out


def ref_min_balance(h, live, root, weights) -> float:
    return min(ref_balances(h, live, root, weights).values())


def ref_subtree_aggregates(h, live: set[int], r: int, weights):
    """Recursive subtree mass and size over the live tree under r."""
    agg: dict[int, float] = {}
    size: dict[int, int] = {}

    def walk(v):
        a = float(weights[v])
        s = 1
        for c in h.children[v]:
            if c in live:
                walk(c)
                a += agg[c]
                s += size[c]
        agg[v] = a
        size[v] = s

    walk(r)
    return agg, size


def ref_round_weights(values, n: int) -> list[int]:
    """Ceil(n^2 * p / max p) in exact rational arithmetic."""
    fr = [Fraction(float(v)) for v in values]
    mx = max(fr)
    out = []
    for f in fr:
        if f == 0:
            out.append(0)
        else:
            q = Fraction(n * n) * f / mx
            out.append(int(-(-q.numerator // q.denominator)))
    return out


def ref_optimal_cost(h, weights, costs=None) -> float:
    """Exhaustive optimum over frozenset states; no bitmasks, no sharing."""
    children = h.children

    def reach(live: frozenset, u: int) -> frozenset:
        return frozenset(ref_reach(h, set(live), u))

    memo: dict[frozenset, float] = {}

    def mass(s):
        return sum(weights[v] for v in s)

    def best(live: frozenset) -> float:
        if len(live) <= 1:
            return 0.0
        if live in memo:
            return memo[live]
        out = float("inf")
        for q in live:
            yes = reach(live, q)
            if yes == live:
                continue
            price = 1.0 if costs is None else costs[q]
            cand = price * mass(live) + best(yes) + best(live - yes)
            out = min(out, cand)
        memo[live] = out
        return out

    full = frozenset(range(h.n))
    return best(full) / mass(full)


def live_set(view) -> set[int]:
    return set(int(v) for v in np.flatnonzero(view.member))
