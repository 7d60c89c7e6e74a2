"""Batch evaluation: cost tables, shrink curves, runtime probes, replays."""

from __future__ import annotations

import io
import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .distributions import OnlineLearner
from .errors import BadParameter
from .policies import (FixedOrderPolicy, Transcript, make_oracle, new_search,
                       resolve, run_search)


@dataclass
class EvalReport:
    """Outcome of one policy/distribution evaluation run."""

    kind: str
    targets: list[int]
    per_target_questions: list[int]
    per_target_price: list[float]
    expected_cost: float | None = None
    expected_price: float | None = None
    mean_questions: float = 0.0
    window_means: list[float] = field(default_factory=list)
    window_size: int = 0


def batch_evaluate(h, weights, kind: str, targets=None, costs=None,
                   rounded: bool | None = None, online: bool = False,
                   window: int = 1000, learner: OnlineLearner | None = None) -> EvalReport:
    """Run one search per target and aggregate costs.

    With targets=None every node is searched once and expected_cost is the
    probability-weighted mean.  With an explicit target stream the report
    carries the running mean per `window` block.  online=True reselects the
    question weights from a frequency learner before each object and feeds
    each resolution back, starting from the equal distribution unless a
    primed learner is passed in.
    """
    p = np.asarray(weights, dtype=np.float64)
    exhaustive = targets is None
    if exhaustive:
        target_list = list(range(h.n))
    else:
        target_list = [int(t) for t in targets]
    if online and exhaustive:
        raise BadParameter("online evaluation needs a target stream")
    if online and learner is None:
        learner = OnlineLearner(h.n)

    base = None
    if not online:
        base = new_search(h, p, kind, costs=costs, rounded=rounded)
    questions: list[int] = []
    prices: list[float] = []
    for t in target_list:
        oracle = make_oracle(h, t)
        if online:
            tr = run_search(h, learner.current(), kind, oracle, costs=costs,
                            rounded=rounded)
        else:
            tr = resolve(base.copy(), oracle)
        if tr.result != t:
            raise AssertionError(
                f"search resolved {h.labels[tr.result]} for target {h.labels[t]}")
        questions.append(tr.question_count)
        prices.append(tr.total_price)
        if online:
            learner.observe(t)

    report = EvalReport(kind=kind, targets=target_list,
                        per_target_questions=questions,
                        per_target_price=prices, window_size=window)
    qarr = np.asarray(questions, dtype=np.float64)
    report.mean_questions = float(qarr.mean()) if questions else 0.0
    if exhaustive:
        total = p.sum()
        report.expected_cost = float((p * qarr).sum() / total)
        report.expected_price = float((p * np.asarray(prices)).sum() / total)
    else:
        for start in range(0, len(questions), window):
            block = qarr[start:start + window]
            if block.size:
                report.window_means.append(float(block.mean()))
    return report


def css_curve(h, weights, kind: str, costs=None,
              rounded: bool | None = None) -> list[tuple[int, float]]:
    """Mean live-candidate count after k questions, averaged over targets.

    Each target's count sequence starts at n and is padded with 1 once its
    search has resolved, so the curve is defined up to the longest search.
    """
    p = np.asarray(weights, dtype=np.float64)
    base = new_search(h, p, kind, costs=costs, rounded=rounded)
    traces: list[list[int]] = []
    for t in range(h.n):
        tr = resolve(base.copy(), make_oracle(h, t))
        traces.append(tr.live_counts())
    longest = max(len(t) for t in traces) if traces else 0
    curve = [(0, float(h.n))]
    for k in range(1, longest + 1):
        vals = [t[k - 1] if k <= len(t) else 1 for t in traces]
        curve.append((k, float(np.mean(vals))))
    return curve


def replay_strategy(h, weights, priority_labels: list[str],
                    object_counts: dict[str, int]):
    """Score a fixed question order against a labeled-object tally.

    Returns (per-category question counts, total questions over all
    objects).  Each category is searched once with the scripted order; its
    question count is then weighted by how many objects carry that label.
    """
    order = [h.id_of(lab) for lab in priority_labels]
    policy = FixedOrderPolicy(order)
    base = new_search(h, weights, policy=policy)
    per_category: dict[str, int] = {}
    total = 0
    for lab, count in object_counts.items():
        t = h.id_of(lab)
        tr = resolve(base.copy(), make_oracle(h, t))
        if tr.result != t:
            raise AssertionError(f"strategy misresolved {lab}")
        per_category[lab] = tr.question_count
        total += count * tr.question_count
    return per_category, total


@dataclass
class ProbeRow:
    kind: str
    depth: int
    target: int
    seconds: float


@dataclass
class ProbeResult:
    rows: list[ProbeRow]
    n: int

    def mean_seconds(self, kind: str) -> float:
        vals = [r.seconds for r in self.rows if r.kind == kind]
        if not vals:
            raise BadParameter(f"no probe rows for {kind!r}")
        return float(np.mean(vals))


def runtime_probe(h, weights, kinds, targets_per_depth: int = 3,
                  repetitions: int = 5, rng=None, costs=None) -> ProbeResult:
    """Wall-time one search per sampled target for each policy.

    Targets are drawn per depth level (with replacement), and each search
    is repeated; the median repetition damps scheduler noise.  Searches fork
    one prepared state per policy, so rows report the steady-state cost of
    serving a search, not the one-off aggregate build.
    """
    rng = rng or np.random.default_rng(0)
    p = np.asarray(weights, dtype=np.float64)
    by_depth: dict[int, np.ndarray] = {}
    for d in np.unique(h.depth):
        by_depth[int(d)] = np.flatnonzero(h.depth == d)
    picks: list[tuple[int, int]] = []
    for d, nodes in sorted(by_depth.items()):
        idx = rng.integers(0, nodes.size, size=targets_per_depth)
        picks.extend((d, int(nodes[i])) for i in idx)
    rows: list[ProbeRow] = []
    for kind in kinds:
        base = new_search(h, p, kind, costs=costs)
        for d, t in picks:
            oracle = make_oracle(h, t)
            times = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                resolve(base.copy(), oracle)
                times.append(time.perf_counter() - t0)
            rows.append(ProbeRow(kind=kind, depth=d, target=t,
                                 seconds=float(np.median(times))))
    return ProbeResult(rows=rows, n=h.n)


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
