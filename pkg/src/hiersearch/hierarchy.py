"""Category hierarchy model: ingestion, validation, reachability, candidate views.

A hierarchy is a directed acyclic graph whose edges point from a broader
category to a narrower one.  Nodes are dense integer ids; labels are kept
for input and output only.  Interactive search narrows a boolean "live"
mask over the nodes (the candidate view) until one candidate remains.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    CycleDetected,
    EmptyInput,
    NodeNotLive,
    NotATree,
    UnknownNode,
)

logger = logging.getLogger(__name__)


class Hierarchy:
    """Immutable rooted DAG over dense node ids with precomputed traversal data.

    Construction validates acyclicity and precomputes a topological order,
    longest-path depths, and (for trees) a preorder interval labelling that
    makes subtree tests O(1).  Instances are shared freely across searches;
    nothing here mutates after __init__.
    """

    def __init__(self, labels: list[str], edges: list[tuple[int, int]],
                 synthetic_root: bool = False):
        if not labels:
            raise EmptyInput("hierarchy has no nodes")
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            dup = next(l for i, l in enumerate(self.labels) if self.labels.index(l) != i)
            raise UnknownNode(f"duplicate label {dup!r}")
        n = len(self.labels)

        self.children: list[list[int]] = [[] for _ in range(n)]
        self.parents: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        m = 0
        for a, b in edges:
            if (a, b) in seen:
                logger.warning("duplicate edge %s -> %s ignored",
                               self.labels[a], self.labels[b])
                continue
            seen.add((a, b))
            self.children[a].append(b)
            self.parents[b].append(a)
            m += 1
        self.n = n
        self.m = m
        self.synthetic_root = synthetic_root

        self.roots = [v for v in range(n) if not self.parents[v]]
        if not self.roots:
            raise CycleDetected(self._witness_cycle(set(range(n))))
        self.topo_order = self._toposort()

        # Longest root-to-node path length, computed over the topological order.
        depth = np.zeros(n, dtype=np.int64)
        for v in self.topo_order:
            dv = depth[v]
            for c in self.children[v]:
                if dv + 1 > depth[c]:
                    depth[c] = dv + 1
        self.depth = depth

        self.is_tree = (m == n - 1) and all(len(self.parents[v]) <= 1 for v in range(n))
        if self.is_tree and len(self.roots) == 1:
            self._build_tree_index()
        else:
            self.parent_arr = None
            self.preorder = None
            self.tin = None
            self.tout = None
            self.subtree_size = None

    # -- construction helpers -------------------------------------------------

    def _toposort(self) -> np.ndarray:
        indeg = [len(self.parents[v]) for v in range(self.n)]
        order = []
        queue = deque(self.roots)
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in self.children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.n:
            rest = {v for v in range(self.n) if indeg[v] > 0}
            raise CycleDetected(self._witness_cycle(rest))
        return np.asarray(order, dtype=np.int64)

    def _witness_cycle(self, residue: set[int]) -> list[str]:
        # Every node in `residue` has a parent in `residue`, so walking
        # parent links must revisit a node; the revisited stretch is a cycle.
        start = next(iter(residue))
        path = [start]
        pos = {start: 0}
        cur = start
        while True:
            nxt = next(p for p in self.parents[cur] if p in residue)
            if nxt in pos:
                cyc = path[pos[nxt]:] + [nxt]
                return [self.labels[v] for v in reversed(cyc)]
            pos[nxt] = len(path)
            path.append(nxt)
            cur = nxt

    def _build_tree_index(self) -> None:
        n = self.n
        parent = np.full(n, -1, dtype=np.int64)
        for v in range(n):
            if self.parents[v]:
                parent[v] = self.parents[v][0]
        self.parent_arr = parent

        # Iterative preorder respecting the stored child order.  tin/tout give
        # half-open preorder intervals: u is an ancestor-or-self of v exactly
        # when tin[u] <= tin[v] < tout[u].
        preorder = np.empty(n, dtype=np.int64)
        tin = np.empty(n, dtype=np.int64)
        tout = np.empty(n, dtype=np.int64)
        stack = [self.roots[0]]
        t = 0
        while stack:
            v = stack.pop()
            preorder[t] = v
            tin[v] = t
            t += 1
            for c in reversed(self.children[v]):
                stack.append(c)
        size = np.ones(n, dtype=np.int64)
        for v in reversed(preorder):
            tout[v] = tin[v] + size[v]
            p = parent[v]
            if p >= 0:
                size[p] += size[v]
        self.preorder = preorder
        self.tin = tin
        self.tout = tout
        self.subtree_size = size

    # -- basic accessors -------------------------------------------------------

    @property
    def root(self) -> int:
        if len(self.roots) != 1:
            raise NotATree(f"hierarchy has {len(self.roots)} roots; "
                           "call ensure_single_root first")
        return self.roots[0]

    def id_of(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownNode(f"unknown node {label!r}") from None

    def stats(self) -> "HierarchyStats":
        maxdeg = max((len(c) for c in self.children), default=0)
        height = int(self.depth.max()) if self.n else 0
        return HierarchyStats(n=self.n, m=self.m, height=height,
                              max_out_degree=maxdeg, is_tree=self.is_tree)

    def to_edge_text(self) -> str:
        lines = []
        for v in range(self.n):
            for c in self.children[v]:
                lines.append(f"{self.labels[v]}\t{self.labels[c]}")
        connected = {v for v in range(self.n) if self.children[v] or self.parents[v]}
        for v in range(self.n):
            if v not in connected:
                lines.append(self.labels[v])
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HierarchyStats:
    n: int
    m: int
    height: int
    max_out_degree: int
    is_tree: bool

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "height": self.height,
                "max_out_degree": self.max_out_degree, "is_tree": self.is_tree}


def parse_edge_list(text: str):
    """Parse tab-separated parent/child lines.

    Blank lines and lines starting with '#' are ignored.  A line with a
    single token declares an isolated node.  Returns (labels, edges) with
    labels in first-seen order and edges as id pairs.
    """
    labels: list[str] = []
    index: dict[str, int] = {}

    def intern(tok: str) -> int:
        if tok not in index:
            index[tok] = len(labels)
            labels.append(tok)
        return index[tok]

    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t") if p.strip()]
        if len(parts) == 1:
            intern(parts[0])
            continue
        if len(parts) != 2:
            raise EmptyInput(f"line {lineno}: expected 'parent<TAB>child', got {raw!r}")
        a = intern(parts[0])
        b = intern(parts[1])
        edges.append((a, b))
    if not labels:
        raise EmptyInput("no nodes in input")
    return labels, edges


def load_hierarchy(text: str) -> Hierarchy:
    """Build a validated Hierarchy from an edge-list text."""
    labels, edges = parse_edge_list(text)
    return Hierarchy(labels, edges)


def ensure_single_root(h: Hierarchy) -> Hierarchy:
    """Return `h` if single-rooted, else attach a synthetic root above all roots.

    The synthetic root is a pure connector: callers assign it probability
    zero and never draw it as a target.
    """
    if len(h.roots) == 1:
        return h
    name = "__root__"
    k = 1
    while name in h.index:
        name = f"__root__{k}"
        k += 1
    labels = [name] + h.labels
    edges = [(0, r + 1) for r in h.roots]
    for v in range(h.n):
        for c in h.children[v]:
            edges.append((v + 1, c + 1))
    return Hierarchy(labels, edges, synthetic_root=True)


class CandidateView:
    """Mutable live-candidate mask for one search over a fixed Hierarchy."""

    __slots__ = ("member", "live_count", "root")

    def __init__(self, member: np.ndarray, live_count: int, root: int):
        self.member = member
        self.live_count = live_count
        self.root = root

    @classmethod
    def full(cls, h: Hierarchy) -> "CandidateView":
        return cls(np.ones(h.n, dtype=bool), h.n, h.root)

    def copy(self) -> "CandidateView":
        return CandidateView(self.member.copy(), self.live_count, self.root)

    def is_live(self, v: int) -> bool:
        return bool(self.member[v])

    def live_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.member)


def reachable_list(h: Hierarchy, u: int, view: CandidateView | None = None) -> list[int]:
    """Live nodes reachable from u (inclusive) via live-node paths, BFS order."""
    member = view.member if view is not None else None
    if member is not None and not member[u]:
        raise NodeNotLive(f"node {h.labels[u]!r} is not live")
    seen = np.zeros(h.n, dtype=bool)
    seen[u] = True
    out = [u]
    queue = deque((u,))
    children = h.children
    while queue:
        v = queue.popleft()
        for c in children[v]:
            if not seen[c] and (member is None or member[c]):
                seen[c] = True
                out.append(c)
                queue.append(c)
    return out


def reachable_set(h: Hierarchy, u: int, view: CandidateView | None = None) -> set[int]:
    return set(reachable_list(h, u, view))


def reachable_set_weight(h: Hierarchy, u: int, weights: np.ndarray,
                         view: CandidateView | None = None) -> float:
    """Total weight of the live reachable set of u, including u itself."""
    total = 0.0
    for v in reachable_list(h, u, view):
        total += weights[v]
    return total


def ancestor_set(h: Hierarchy, v: int) -> set[int]:
    """All ancestors of v in the full graph, v included."""
    seen = {v}
    queue = deque((v,))
    while queue:
        u = queue.popleft()
        for p in h.parents[u]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return seen


def apply_answer(view: CandidateView, h: Hierarchy, q: int, answer: bool) -> CandidateView:
    """Narrow the view by the answer to "is the target under q?".

    Yes keeps exactly the live reachable set of q and re-roots at q; no
    removes that set.  The view is mutated in place and returned.
    """
    if not view.member[q]:
        raise NodeNotLive(f"question node {h.labels[q]!r} is not live")
    if h.tin is not None:
        inside = (h.tin >= h.tin[q]) & (h.tin < h.tout[q])
        if answer:
            view.member &= inside
            view.root = q
        else:
            view.member &= ~inside
    else:
        reach = reachable_list(h, q, view)
        if answer:
            view.member[:] = False
            view.member[reach] = True
            view.root = q
        else:
            view.member[reach] = False
    view.live_count = int(np.count_nonzero(view.member))
    return view
