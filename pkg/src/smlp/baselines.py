"""Cross-layer baselines: score aggregation over layers and core-neighborhood metrics."""

import numpy as np

from .exceptions import DataError
from .graph import combine
from .metrics import score_pairs, metric_id

MULTIPLEX_METRICS = ("CN", "JC", "PA", "AA")


def _as_cube(cube):
    arr = np.asarray(cube, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise DataError("score cube must be shaped (pairs, layers) with at least one layer")
    return arr


def average_aggregation(cube):
    """Mean score over layers; ``cube`` is shaped ``(pairs, layers)``."""
    arr = _as_cube(cube)
    return arr.sum(axis=1) / arr.shape[1]


def entropy_aggregation(cube, base=2.0):
    """Shannon entropy of each pair's score distribution over layers.

    Pairs with no score in any layer get 0.
    """
    arr = _as_cube(cube)
    if np.any(arr < 0):
        raise DataError("entropy aggregation needs non-negative scores")
    total = arr.sum(axis=1, keepdims=True)
    p = np.divide(arr, total, out=np.zeros_like(arr), where=total > 0)
    logs = np.log(p, out=np.zeros_like(p), where=p > 0) / np.log(base)
    return -(p * logs).sum(axis=1)


def score_cube(views, metric, pairs):
    """Stack one metric over several layer views into a ``(pairs, layers)`` cube."""
    return np.column_stack([score_pairs(v, metric, pairs) for v in views])


def core_graph(target_view, other_views):
    """Target edges present in every other view; weights from the target."""
    g = target_view
    for v in other_views:
        g = combine(g, v, "intersection")
    return g


def multiplex_metric(target_view, other_views, metric, pairs):
    """A metric evaluated with neighborhoods restricted to the core graph."""
    key = metric_id(metric)
    if key not in MULTIPLEX_METRICS:
        raise DataError(f"no multiplex variant of {metric!r}; choose from {MULTIPLEX_METRICS}")
    if not other_views:
        raise DataError("multiplex metrics need at least two layers")
    return score_pairs(core_graph(target_view, other_views), key, pairs)
