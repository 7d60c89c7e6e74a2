"""Target-probability handling: normalization, integer rounding, synthetic
distributions and the online frequency learner."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, BadParameter, UnknownNode

DISTRIBUTION_KINDS = ("equal", "uniform", "exponential", "zipf", "file")


def normalize(raw) -> np.ndarray:
    """Scale nonnegative weights to sum to one."""
    p = np.asarray(raw, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise BadParameter("weights must be a nonempty vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise BadParameter("weights must be finite and nonnegative")
    total = p.sum()
    if total <= 0:
        raise AllZero("all weights are zero")
    return p / total


def round_weights(p, n: int) -> np.ndarray:
    """Integer surrogate weights: w(u) = ceil(n^2 * p(u) / max_v p(v)).

    `n` is the node count of the original full graph, fixed for the whole
    search.  The ceiling is taken over exact rationals so float inputs
    cannot straddle an integer boundary; results fit comfortably in int64
    for any practical n (n^2 <= 10^10 at n = 100k).
    """
    p = np.asarray(p, dtype=np.float64)
    if n <= 0:
        raise BadParameter("n must be positive")
    maxp = p.max()
    if maxp <= 0:
        raise AllZero("all weights are zero")
    nn = n * n
    # Every float is an exact rational a/b, so ceil(nn*v/maxp) reduces to an
    # integer ceiling division with no rounding anywhere.
    mnum, mden = float(maxp).as_integer_ratio()
    out = np.empty(p.size, dtype=np.int64)
    for i, v in enumerate(p.tolist()):
        if v == 0.0:
            out[i] = 0
        else:
            vnum, vden = v.as_integer_ratio()
            num = nn * vnum * mden
            den = vden * mnum
            out[i] = -(-num // den)
    return out


@dataclass(frozen=True)
class DistributionSpec:
    """How to produce a target distribution over n nodes.

    kind: one of equal | uniform | exponential | zipf | file.
    a: Zipf shape parameter, required > 1 for kind="zipf".
    seed: RNG seed; required for the random kinds.
    text: weight-file contents for kind="file".
    """

    kind: str
    a: float | None = None
    seed: int | None = None
    text: str | None = None

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise BadParameter(f"unknown distribution kind {self.kind!r}")
        if self.kind == "zipf":
            if self.a is None or self.a <= 1.0:
                raise BadParameter("zipf requires shape a > 1")
        if self.kind in ("uniform", "exponential", "zipf") and self.seed is None:
            raise BadParameter(f"{self.kind} distribution requires a seed")
        if self.kind == "file" and self.text is None:
            raise BadParameter("file distribution requires file contents")


def generate(spec: DistributionSpec, labels: list[str]) -> np.ndarray:
    """Materialize a normalized distribution for the given node labels.

    Random kinds draw one independent weight per node from the named family
    (Zipf draws integer ranks with density proportional to x^-a) and
    normalize.  Identical spec and labels give identical output.
    """
    n = len(labels)
    if n == 0:
        raise BadParameter("no nodes")
    if spec.kind == "equal":
        return np.full(n, 1.0 / n)
    if spec.kind == "file":
        return parse_weight_file(spec.text, labels)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "uniform":
        raw = rng.uniform(0.0, 1.0, size=n)
        raw = np.where(raw <= 0, np.finfo(float).tiny, raw)
    elif spec.kind == "exponential":
        raw = rng.exponential(1.0, size=n)
        raw = np.where(raw <= 0, np.finfo(float).tiny, raw)
    else:
        raw = rng.zipf(spec.a, size=n).astype(np.float64)
    return normalize(raw)


def _parse_value_lines(text: str, labels: list[str], what: str) -> np.ndarray:
    index = {lab: i for i, lab in enumerate(labels)}
    raw = np.full(len(labels), np.nan)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t") if p.strip()]
        if len(parts) != 2:
            raise BadParameter(f"line {lineno}: expected 'node<TAB>{what}'")
        name, value = parts
        if name not in index:
            raise UnknownNode(f"line {lineno}: unknown node {name!r}")
        try:
            w = float(value)
        except ValueError:
            raise BadParameter(f"line {lineno}: bad {what} {value!r}") from None
        if not np.isfinite(w):
            raise BadParameter(f"line {lineno}: {what} must be finite")
        raw[index[name]] = w
    missing = [labels[i] for i in np.flatnonzero(np.isnan(raw))]
    if missing:
        raise BadParameter(f"missing {what}s for: {', '.join(missing[:5])}")
    return raw


def parse_weight_file(text: str, labels: list[str]) -> np.ndarray:
    """Parse `node<TAB>weight` lines into a normalized vector over labels.

    Every hierarchy label must get a weight; unknown node names are
    rejected.  Blank lines and '#' comments are ignored.
    """
    raw = _parse_value_lines(text, labels, "weight")
    if np.any(raw < 0):
        raise BadParameter("weights must be >= 0")
    return normalize(raw)


def parse_cost_file(text: str, labels: list[str]) -> np.ndarray:
    """Parse `node<TAB>cost` lines; question prices stay unnormalized."""
    raw = _parse_value_lines(text, labels, "cost")
    if np.any(raw <= 0):
        raise BadParameter("costs must be positive")
    return raw


def zero_synthetic_root(p: np.ndarray, h) -> np.ndarray:
    """Force a synthetic connector root to probability zero and renormalize."""
    if not getattr(h, "synthetic_root", False):
        return p
    q = p.copy()
    q[h.root] = 0.0
    return normalize(q)


class OnlineLearner:
    """Running category-frequency estimate with add-one smoothing.

    current() returns (counts + 1) / (total + n): an equal distribution
    before any observation, converging to empirical frequencies.  Single
    writer; counts never decrease.
    """

    def __init__(self, n: int, counts=None, total: int | None = None):
        if n <= 0:
            raise BadParameter("learner needs at least one node")
        self.n = n
        if counts is None:
            self.counts = np.zeros(n, dtype=np.int64)
            self.total = 0
        else:
            self.counts = np.asarray(counts, dtype=np.int64).copy()
            if self.counts.size != n or np.any(self.counts < 0):
                raise BadParameter("bad seed counts")
            self.total = int(self.counts.sum()) if total is None else int(total)

    def observe(self, node: int) -> None:
        if not 0 <= node < self.n:
            raise UnknownNode(f"node id {node} out of range")
        self.counts[node] += 1
        self.total += 1

    def current(self) -> np.ndarray:
        return (self.counts + 1.0) / (self.total + self.n)

    def snapshot(self) -> dict:
        nz = np.flatnonzero(self.counts)
        return {"total": self.total,
                "counts": {int(i): int(self.counts[i]) for i in nz}}

    @classmethod
    def from_snapshot(cls, n: int, snap: dict) -> "OnlineLearner":
        counts = np.zeros(n, dtype=np.int64)
        for i, c in snap.get("counts", {}).items():
            counts[int(i)] = c
        return cls(n, counts=counts, total=snap.get("total"))
