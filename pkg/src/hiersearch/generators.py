"""Random hierarchy generators for benchmarks and randomized checks."""

from __future__ import annotations

import numpy as np

from .errors import BadParameter
from .hierarchy import Hierarchy


def random_tree(n: int, rng: np.random.Generator, max_children: int = 4) -> Hierarchy:
    """Uniform random attachment tree with bounded out-degree.

    Each new node picks its parent uniformly among nodes that still have
    child capacity, which keeps the height logarithmic in n.  Node ids are
    already in topological order.
    """
    if n < 1:
        raise BadParameter("need at least one node")
    if max_children < 1:
        raise BadParameter("max_children must be positive")
    labels = [f"n{i}" for i in range(n)]
    edges = []
    open_slots = [0]
    child_count = [0] * n
    for v in range(1, n):
        j = int(rng.integers(0, len(open_slots)))
        parent = open_slots[j]
        edges.append((parent, v))
        child_count[parent] += 1
        if child_count[parent] >= max_children:
            open_slots[j] = open_slots[-1]
            open_slots.pop()
        open_slots.append(v)
    return Hierarchy(labels, edges)


def random_dag(n: int, rng: np.random.Generator, max_children: int = 4,
               extra_edge_frac: float = 0.15) -> Hierarchy:
    """Random single-rooted DAG: a bounded-degree tree plus forward edges.

    Extra edges always point from a lower id to a higher one, so the
    result stays acyclic with multi-parent sharing.
    """
    base = random_tree(n, rng, max_children)
    edges = [(v, c) for v in range(n) for c in base.children[v]]
    present = set(edges)
    extra = int(round(extra_edge_frac * n))
    attempts = 0
    added = 0
    while added < extra and attempts < 20 * (extra + 1) and n > 2:
        attempts += 1
        u = int(rng.integers(0, n - 1))
        v = int(rng.integers(u + 1, n))
        if (u, v) in present:
            continue
        present.add((u, v))
        edges.append((u, v))
        added += 1
    return Hierarchy(base.labels, edges)


def sample_targets(p: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw k target nodes i.i.d. from the distribution p."""
    return rng.choice(p.size, size=k, p=p / p.sum())
