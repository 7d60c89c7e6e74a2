"""Small built-in hierarchies used by the docs, demos and golden checks."""

from __future__ import annotations

import numpy as np

from .distributions import normalize
from .hierarchy import Hierarchy, load_hierarchy

VEHICLE_EDGES = """\
Vehicle\tCar
Car\tMercedes
Car\tHonda
Car\tNissan
Nissan\tMaxima
Nissan\tSentra
"""

# Labeled-image counts per category in the running vehicle example.
VEHICLE_COUNTS = {
    "Vehicle": 4,
    "Car": 2,
    "Mercedes": 2,
    "Honda": 4,
    "Nissan": 8,
    "Maxima": 40,
    "Sentra": 40,
}

# Scripted labeling strategies replayed over the vehicle counts: ask the
# listed questions in order, skipping ones the answers already settled.
VEHICLE_STRATEGY_BROAD = ["Nissan", "Car", "Honda", "Mercedes"]
VEHICLE_STRATEGY_LEAF = ["Maxima", "Sentra", "Nissan", "Car", "Honda", "Mercedes"]


def vehicle() -> Hierarchy:
    return load_hierarchy(VEHICLE_EDGES)


def vehicle_real_weights(h: Hierarchy | None = None) -> np.ndarray:
    h = h or vehicle()
    return normalize([VEHICLE_COUNTS[lab] for lab in h.labels])


def chain(k: int) -> Hierarchy:
    """Path hierarchy 1 -> 2 -> ... -> k."""
    labels = [str(i + 1) for i in range(k)]
    edges = [(i, i + 1) for i in range(k - 1)]
    return Hierarchy(labels, edges)


def diamond() -> Hierarchy:
    """Four-node DAG with a shared sink: r -> a, r -> b, a -> c, b -> c."""
    return Hierarchy(["r", "a", "b", "c"], [(0, 1), (0, 2), (1, 3), (2, 3)])
