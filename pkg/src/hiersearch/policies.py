"""Question-selection policies and the interactive search loop.

A search holds a SearchState: the hierarchy, the candidate view, the target
weights, and whatever per-policy aggregates the selection rule maintains.
The loop is always the same: pick a question node, ask whether the target
falls under it, then keep (and re-root at) or remove that node's live
reachable set.  Any non-root question strictly shrinks the candidate set,
so every policy below terminates.

Policies:
  top_down        ask the first live child of the current root
  greedy_naive    rescan every live node, one reachability sweep each
  greedy_tree     heavy-path descent over subtree aggregates (trees only)
  greedy_dag      pruned scan over rounded reachable-set weights (DAGs)
  cost_sensitive  maximize split product per unit question price
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hierarchy as hg
from .distributions import round_weights
from .errors import (
    AlreadyResolved,
    BadParameter,
    NodeNotLive,
    NotATree,
    PolicyMismatch,
    StaleQuestion,
)

POLICY_KINDS = ("top_down", "greedy_naive", "greedy_tree", "greedy_dag",
                "cost_sensitive")


@dataclass(frozen=True)
class Question:
    """One proposed query: `balance` is the diagnostic |2w(G_q) - w(G)|."""

    node: int
    ordinal: int
    balance: float


@dataclass(frozen=True)
class TranscriptEntry:
    question: Question
    answer: bool
    live_after: int


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)
    result: int | None = None
    total_price: float = 0.0

    @property
    def question_count(self) -> int:
        return len(self.entries)

    def answers(self) -> list[bool]:
        return [e.answer for e in self.entries]

    def live_counts(self) -> list[int]:
        return [e.live_after for e in self.entries]


class SearchState:
    """Everything one in-progress search needs; copyable for tree building."""

    __slots__ = ("h", "view", "p", "w", "costs", "use_rounded", "policy",
                 "agg_p", "size", "agg_w", "questions_asked",
                 "_vis", "_vis_epoch", "_wlist")

    def __init__(self, h, view, p, w, costs, use_rounded, policy):
        self.h = h
        self.view = view
        self.p = p
        self.w = w
        self.costs = costs
        self.use_rounded = use_rounded
        self.policy = policy
        self.agg_p = None
        self.size = None
        self.agg_w = None
        self.questions_asked = 0
        self._vis = None
        self._vis_epoch = 0
        self._wlist = None

    # Scratch for epoch-stamped BFS: resetting is a counter bump, not a fill.
    def scratch(self) -> tuple[np.ndarray, int]:
        if self._vis is None:
            self._vis = np.zeros(self.h.n, dtype=np.int64)
            self._vis_epoch = 0
        self._vis_epoch += 1
        return self._vis, self._vis_epoch

    def select_weights(self) -> np.ndarray:
        return self.w if self.use_rounded else self.p

    def weight_list(self) -> list:
        if self._wlist is None:
            self._wlist = self.select_weights().tolist()
        return self._wlist

    def live_total(self):
        wts = self.select_weights()
        total = wts[self.view.member].sum()
        return int(total) if self.use_rounded else float(total)

    def copy(self) -> "SearchState":
        dup = SearchState(self.h, self.view.copy(), self.p, self.w,
                          self.costs, self.use_rounded, self.policy)
        dup.agg_p = None if self.agg_p is None else self.agg_p.copy()
        dup.size = None if self.size is None else self.size.copy()
        dup.agg_w = None if self.agg_w is None else self.agg_w.copy()
        dup.questions_asked = self.questions_asked
        dup._wlist = self._wlist
        return dup


def _reach_weight_count(state: SearchState, u: int, mlist: list,
                        wlist: list) -> tuple[float, int]:
    """Weight and size of the live reachable set of u, u included."""
    vis, epoch = state.scratch()
    children = state.h.children
    vis[u] = epoch
    total = wlist[u]
    queue = [u]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for c in children[v]:
            if vis[c] != epoch and mlist[c]:
                vis[c] = epoch
                total += wlist[c]
                queue.append(c)
    return total, len(queue)


class _PolicyBase:
    kind = "abstract"
    needs_deleted_list = False

    def attach(self, state: SearchState) -> None:
        pass

    def select(self, state: SearchState):
        raise NotImplementedError

    def on_yes(self, state: SearchState, q: int) -> None:
        pass

    def on_no(self, state: SearchState, q: int, deleted) -> None:
        pass


class TopDownPolicy(_PolicyBase):
    """Walk the stored child order from the root, one level per yes."""

    kind = "top_down"

    def select(self, state):
        view = state.view
        member = view.member
        for c in state.h.children[view.root]:
            if member[c]:
                mlist = member.tolist()
                rw, _ = _reach_weight_count(state, c, mlist, state.weight_list())
                return c, abs(2 * rw - state.live_total())
        raise AlreadyResolved("root has no live children")


class GreedyNaivePolicy(_PolicyBase):
    """Definitional middle point: rescan all live nodes every round.

    One reachability sweep per candidate, so a round costs the sum of all
    live reachable-set sizes.  Kept as the reference implementation the
    faster policies are checked against.
    """

    kind = "greedy_naive"

    def select(self, state):
        view = state.view
        root = view.root
        mlist = view.member.tolist()
        wlist = state.weight_list()
        total = state.live_total()
        best, best_bal = -1, None
        for u in view.live_nodes():
            u = int(u)
            if u == root:
                continue
            rw, _ = _reach_weight_count(state, u, mlist, wlist)
            bal = abs(2 * rw - total)
            if best_bal is None or bal < best_bal:
                best, best_bal = u, bal
        if best < 0:
            raise AlreadyResolved("no live candidate besides the root")
        return best, best_bal


class GreedyTreePolicy(_PolicyBase):
    """Heavy-path descent over maintained subtree aggregates (trees only).

    agg_p[v] is the live-subtree probability mass under v and size[v] the
    live-subtree node count.  The heavy path from the root is followed while
    a child subtree still holds more than half the live mass; the answer is
    the best-balanced node seen on the way down, ties to the node nearest
    the root.  A no-answer only needs subtraction along the root-to-question
    path, so a question costs O(height * degree).
    """

    kind = "greedy_tree"

    def attach(self, state):
        agg, size = subtree_aggregates(state.h, state.p)
        state.agg_p = agg
        state.size = size

    def select(self, state):
        view = state.view
        member = view.member
        children = state.h.children
        agg = state.agg_p
        total = agg[view.root]
        best, best_bal = -1, None
        v = view.root
        while True:
            heavy, hw = -1, -1.0
            for c in children[v]:
                if member[c] and agg[c] > hw:
                    heavy, hw = c, agg[c]
            if heavy < 0:
                break
            bal = abs(2.0 * hw - total)
            if best_bal is None or bal < best_bal:
                best, best_bal = heavy, bal
            if 2.0 * hw > total:
                v = heavy
            else:
                break
        if best < 0:
            raise AlreadyResolved("no live candidate besides the root")
        return best, float(best_bal)

    def on_no(self, state, q, deleted):
        # Only ancestors of q lose mass; the discarded subtree keeps stale
        # values that are never read again.
        agg, size = state.agg_p, state.size
        dq, dn = agg[q], size[q]
        parent = state.h.parent_arr
        root = state.view.root
        v = q
        while v != root:
            v = parent[v]
            agg[v] -= dq
            size[v] -= dn


class GreedyDAGPolicy(_PolicyBase):
    """Pruned middle-point scan over rounded reachable-set weights.

    agg_w[v] caches the rounded weight of v's live reachable set.  The scan
    BFS-walks from the root and only descends below nodes whose reachable
    set still holds more than half the live weight: anything below a pruned
    node is covered by it, so it cannot score strictly better.  No-answers
    subtract each removed node's weight from all its surviving ancestors.
    """

    kind = "greedy_dag"
    needs_deleted_list = True

    def attach(self, state):
        if state.w is None:
            raise PolicyMismatch("greedy_dag needs rounded weights")
        n = state.h.n
        children = state.h.children
        wlist = state.w.tolist()
        agg = [0] * n
        vis = [0] * n
        for u in range(n):
            epoch = u + 1
            vis[u] = epoch
            total = wlist[u]
            queue = [u]
            qi = 0
            while qi < len(queue):
                v = queue[qi]
                qi += 1
                for c in children[v]:
                    if vis[c] != epoch:
                        vis[c] = epoch
                        total += wlist[c]
                        queue.append(c)
            agg[u] = total
        state.agg_w = np.asarray(agg, dtype=np.int64)

    def select(self, state):
        view = state.view
        member = view.member
        children = state.h.children
        agg = state.agg_w
        total = int(agg[view.root])
        vis, epoch = state.scratch()
        best, best_bal = -1, None
        queue = [view.root]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for c in children[u]:
                if member[c] and vis[c] != epoch:
                    vis[c] = epoch
                    cw = int(agg[c])
                    bal = abs(2 * cw - total)
                    if best_bal is None or bal < best_bal:
                        best, best_bal = c, bal
                    if 2 * cw > total:
                        queue.append(c)
        if best < 0:
            raise AlreadyResolved("no live candidate besides the root")
        return best, float(best_bal)

    def on_no(self, state, q, deleted):
        adjust_weight(state, deleted)


class CostSensitivePolicy(_PolicyBase):
    """Maximize w(G_u) * w(G without G_u) / price(u).

    Ties prefer the smaller candidate subgraph, then input order, so a
    cheap deep probe beats an equally scored broad one.
    """

    kind = "cost_sensitive"

    def select(self, state):
        view = state.view
        root = view.root
        mlist = view.member.tolist()
        wlist = state.weight_list()
        costs = state.costs
        total = state.live_total()
        best, best_score, best_cnt, best_bal = -1, None, 0, 0.0
        for u in view.live_nodes():
            u = int(u)
            if u == root:
                continue
            rw, cnt = _reach_weight_count(state, u, mlist, wlist)
            price = 1.0 if costs is None else costs[u]
            score = rw * (total - rw) / price
            if best_score is None or score > best_score or \
                    (score == best_score and cnt < best_cnt):
                best, best_score, best_cnt = u, score, cnt
                best_bal = abs(2 * rw - total)
        if best < 0:
            raise AlreadyResolved("no live candidate besides the root")
        return best, best_bal


class FixedOrderPolicy(_PolicyBase):
    """Replay a fixed question priority; used to score scripted strategies.

    Asks the first live non-root node of `priority`, falling back to input
    order once the list is exhausted.
    """

    kind = "fixed_order"

    def __init__(self, priority: list[int]):
        self.priority = list(priority)

    def select(self, state):
        view = state.view
        member = view.member
        pick = -1
        for u in self.priority:
            if u != view.root and member[u]:
                pick = u
                break
        if pick < 0:
            for u in view.live_nodes():
                u = int(u)
                if u != view.root:
                    pick = u
                    break
        if pick < 0:
            raise AlreadyResolved("no live candidate besides the root")
        mlist = member.tolist()
        rw, _ = _reach_weight_count(state, pick, mlist, state.weight_list())
        return pick, abs(2 * rw - state.live_total())


_SINGLETONS = {
    "top_down": TopDownPolicy(),
    "greedy_naive": GreedyNaivePolicy(),
    "greedy_tree": GreedyTreePolicy(),
    "greedy_dag": GreedyDAGPolicy(),
    "cost_sensitive": CostSensitivePolicy(),
}


def make_policy(kind: str) -> _PolicyBase:
    try:
        return _SINGLETONS[kind]
    except KeyError:
        raise BadParameter(f"unknown policy kind {kind!r}") from None


def subtree_aggregates(h, weights: np.ndarray):
    """Full-tree subtree mass and size for every node, vectorized.

    Subtrees are contiguous preorder intervals, so each mass is a prefix-sum
    difference; sizes come precomputed with the hierarchy.
    """
    if not h.is_tree:
        raise NotATree("subtree aggregates need a tree")
    csum = np.zeros(h.n + 1)
    np.cumsum(weights[h.preorder], out=csum[1:])
    agg = csum[h.tout] - csum[h.tin]
    return agg, h.subtree_size.copy()


def set_weight_dfs(h, r: int, weights: np.ndarray, view=None):
    """One explicit depth-first pass under r filling subtree mass and size.

    Restricted to live nodes when a view is given.  The straightforward
    counterpart of subtree_aggregates, and the recompute the incremental
    updates are checked against.
    """
    if not h.is_tree:
        raise NotATree("set_weight_dfs needs a tree")
    member = view.member if view is not None else None
    if member is not None and not member[r]:
        raise NodeNotLive("subtree root is not live")
    agg = np.zeros(h.n)
    size = np.zeros(h.n, dtype=np.int64)
    stack = [(r, False)]
    while stack:
        v, processed = stack.pop()
        if processed:
            a = float(weights[v])
            s = 1
            for c in h.children[v]:
                if member is None or member[c]:
                    a += agg[c]
                    s += size[c]
            agg[v] = a
            size[v] = s
        else:
            stack.append((v, True))
            for c in h.children[v]:
                if member is None or member[c]:
                    stack.append((c, False))
    return agg, size


def adjust_weight(state: SearchState, removed) -> None:
    """Subtract each removed node's own weight from all of its ancestors.

    Runs against the graph as it stands before the removal is applied; each
    ancestor is visited once per removed node.  Removed nodes' own cached
    weights go stale, which is fine since they are never read again.
    """
    agg = state.agg_w
    if agg is None:
        raise PolicyMismatch("no reachable-set weights to adjust")
    parents = state.h.parents
    w = state.w
    vis, base = state._vis, state._vis_epoch
    if vis is None:
        state.scratch()
        vis, base = state._vis, state._vis_epoch
    epoch = base
    for v in removed:
        epoch += 1
        wv = int(w[v])
        queue = [v]
        qi = 0
        vis[v] = epoch
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for p in parents[u]:
                if vis[p] != epoch:
                    vis[p] = epoch
                    agg[p] -= wv
                    queue.append(p)
    state._vis_epoch = epoch


def new_search(h, weights, kind: str = "greedy_tree", costs=None,
               rounded: bool | None = None, policy: _PolicyBase | None = None,
               rounded_weights=None) -> SearchState:
    """Initialize a search over the full hierarchy.

    `weights` is the target distribution over all nodes.  `rounded` turns on
    integer surrogate weights for greedy_naive and cost_sensitive;
    greedy_dag always uses them.  A prebuilt policy instance may be passed
    for scripted strategies.
    """
    if policy is None:
        policy = make_policy(kind)
    else:
        kind = policy.kind
    root = h.root
    p = np.asarray(weights, dtype=np.float64)
    if p.shape != (h.n,):
        raise BadParameter(f"weights must have length {h.n}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise BadParameter("weights must be finite and nonnegative")
    if kind == "greedy_tree" and not h.is_tree:
        raise PolicyMismatch("greedy_tree requires a tree hierarchy")
    if rounded is None:
        rounded = kind == "greedy_dag"
    if rounded and kind in ("top_down", "greedy_tree"):
        raise BadParameter(f"{kind} does not take rounded weights")
    w = None
    if rounded:
        if rounded_weights is not None:
            w = np.asarray(rounded_weights, dtype=np.int64)
            if w.shape != (h.n,):
                raise BadParameter(f"rounded weights must have length {h.n}")
        else:
            w = round_weights(p, h.n)
    c = None
    if costs is not None:
        c = np.asarray(costs, dtype=np.float64)
        if c.shape != (h.n,):
            raise BadParameter(f"costs must have length {h.n}")
        if np.any(c <= 0) or not np.all(np.isfinite(c)):
            raise BadParameter("costs must be finite and positive")
    view = hg.CandidateView.full(h)
    view.root = root
    state = SearchState(h, view, p, w, c, rounded, policy)
    policy.attach(state)
    return state


def next_question(state: SearchState) -> Question:
    if state.view.live_count <= 1:
        raise AlreadyResolved("search already has a single candidate")
    node, balance = state.policy.select(state)
    return Question(node=node, ordinal=state.questions_asked + 1,
                    balance=float(balance))


def apply_answer(state: SearchState, question: Question, answer: bool) -> None:
    """Narrow the search by one answer, keeping policy aggregates in step."""
    if state.view.live_count <= 1:
        raise AlreadyResolved("search already has a single candidate")
    if question.ordinal != state.questions_asked + 1:
        raise StaleQuestion(
            f"question ordinal {question.ordinal} does not match "
            f"round {state.questions_asked + 1}")
    q = question.node
    view = state.view
    if not view.member[q]:
        raise NodeNotLive(f"question node {state.h.labels[q]!r} is not live")
    h = state.h
    if answer:
        state.policy.on_yes(state, q)
        if h.tin is not None:
            hg.apply_answer(view, h, q, True)
        else:
            reach = hg.reachable_list(h, q, view)
            view.member[:] = False
            view.member[reach] = True
            view.live_count = len(reach)
            view.root = q
    else:
        if state.policy.needs_deleted_list or h.tin is None:
            deleted = hg.reachable_list(h, q, view)
            state.policy.on_no(state, q, deleted)
            view.member[deleted] = False
            view.live_count -= len(deleted)
        else:
            state.policy.on_no(state, q, None)
            hg.apply_answer(view, h, q, False)
    state.questions_asked += 1


def top_down_next(state: SearchState) -> Question:
    _require_kind(state, "top_down")
    return next_question(state)


def greedy_naive_next(state: SearchState) -> Question:
    _require_kind(state, "greedy_naive")
    return next_question(state)


def greedy_tree_next(state: SearchState) -> Question:
    _require_kind(state, "greedy_tree")
    return next_question(state)


def greedy_dag_next(state: SearchState) -> Question:
    _require_kind(state, "greedy_dag")
    return next_question(state)


def cost_sensitive_next(state: SearchState) -> Question:
    _require_kind(state, "cost_sensitive")
    return next_question(state)


def _require_kind(state, kind):
    if state.policy.kind != kind:
        raise PolicyMismatch(f"state was built for {state.policy.kind!r}, "
                             f"not {kind!r}")


def make_oracle(h, target: int):
    """Truthful membership answers for a fixed target node."""
    if h.tin is not None:
        tt = int(h.tin[target])
        tin, tout = h.tin, h.tout
        return lambda q: bool(tin[q] <= tt < tout[q])
    anc = hg.ancestor_set(h, target)
    return lambda q: q in anc


def resolve(state: SearchState, oracle) -> Transcript:
    """Drive an initialized search to resolution against an answer oracle.

    Repeated searches over the same hierarchy and weights should build one
    state with new_search and pass a copy() per target: the policy
    aggregates depend only on the hierarchy and the weights, so forking
    skips rebuilding them.
    """
    t = Transcript()
    while state.view.live_count > 1:
        question = next_question(state)
        ans = bool(oracle(question.node))
        apply_answer(state, question, ans)
        t.entries.append(TranscriptEntry(question, ans, state.view.live_count))
        t.total_price += 1.0 if state.costs is None else float(state.costs[question.node])
    t.result = state.view.root
    return t


def run_search(h, weights, kind: str, oracle, costs=None,
               rounded: bool | None = None, policy: _PolicyBase | None = None,
               rounded_weights=None) -> Transcript:
    """Initialize a search and drive it to resolution in one call."""
    state = new_search(h, weights, kind, costs=costs, rounded=rounded,
                       policy=policy, rounded_weights=rounded_weights)
    return resolve(state, oracle)
