"""Temporal splits, ROC/AUROC and the method-grid experiment runner."""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from . import baselines
from .exceptions import DataError
from .metrics import DEFAULT_METRICS, non_edges, score_pairs
from .pipeline import PipelineConfig, layer_correlations, mi_predictor_view, predict, predict_mi

logger = logging.getLogger(__name__)

POLICIES = ("all", "sampled")


@dataclass(frozen=True)
class SplitSpec:
    """Train on snapshots ``0..=train_end`` and test on ``train_end + 1``."""

    train_end: int
    policy: str = "sampled"
    ratio: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise DataError(f"candidate policy must be one of {POLICIES}")
        if self.train_end < 0:
            raise DataError("train_end must be non-negative")
        if self.policy == "sampled" and not self.ratio > 0:
            raise DataError("sampling ratio must be positive")


@dataclass
class Split:
    target: str
    train_end: int
    pairs: np.ndarray
    labels: np.ndarray


def make_split(net, target, spec):
    """Labelled candidate pairs: new test edges are positive, non-edges negative.

    Pairs already linked in the cumulative training view are not candidates.
    """
    test_t = spec.train_end + 1
    if test_t >= net.n_snapshots:
        raise DataError(f"no test snapshot {test_t} (network has {net.n_snapshots})")
    train = net.view(target, spec.train_end, cumulative=True)
    test = net.view(target, test_t)
    pairs = non_edges(train)
    labels = np.zeros(len(pairs), dtype=np.int8)
    if test.n_edges and len(pairs):
        labels = (np.asarray(test.binary[pairs[:, 0], pairs[:, 1]]).ravel() > 0).astype(np.int8)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DataError(f"degenerate split: no new links in snapshot {test_t} of {target!r}")
    if n_pos == len(labels):
        raise DataError(f"degenerate split: no negatives for snapshot {test_t} of {target!r}")
    if spec.policy == "sampled":
        neg = np.flatnonzero(labels == 0)
        k = min(len(neg), int(math.ceil(spec.ratio * n_pos)))
        rng = np.random.default_rng([spec.seed, spec.train_end])
        keep = np.sort(np.concatenate([np.flatnonzero(labels), rng.choice(neg, size=k, replace=False)]))
        pairs, labels = pairs[keep], labels[keep]
    return Split(target, spec.train_end, pairs, labels)


def _arrays(scores, labels):
    if hasattr(scores, "pairs"):
        if isinstance(labels, dict):
            labels = [labels[tuple(int(v) for v in p)] for p in scores.pairs]
        scores = scores.scores
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel().astype(int)
    if len(s) != len(y):
        raise DataError("scores and labels differ in length")
    if not set(np.unique(y)) <= {0, 1}:
        raise DataError("labels must be 0 or 1")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        raise DataError("AUROC needs both positive and negative labels")
    return s, y


def auroc(scores, labels):
    """Mann-Whitney estimate of P(positive outscores negative), ties count half."""
    s, y = _arrays(scores, labels)
    n_pos = y.sum()
    n_neg = len(y) - n_pos
    ranks = rankdata(s, method="average")
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_curve(scores, labels):
    """``(fpr, tpr)`` arrays with one point per distinct threshold plus the origin."""
    s, y = _arrays(scores, labels)
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / y.sum()]
    fpr = np.r_[0.0, fps / (len(y) - y.sum())]
    return fpr, tpr


def roc_area(fpr, tpr):
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


class MethodContext:
    """Shared, lazily computed inputs for every method evaluated on one split."""

    def __init__(self, net, target, train_end, pairs, cfg):
        self.net = net
        self.target = target
        self.train_end = train_end
        self.pairs = pairs
        self.cfg = cfg
        self._corr = None

    @property
    def correlations(self):
        if self._corr is None:
            self._corr = layer_correlations(self.net, self.target, self.train_end, self.cfg)
        return self._corr

    def train_view(self, layer=None):
        return self.net.view(layer or self.target, self.train_end, cumulative=True)

    def predictor_views(self):
        view = mi_predictor_view(self.net, self.target, self.train_end, self.correlations)
        if view is None:
            raise DataError("multiplex baselines need at least two layers")
        return [view]


def _pipeline(signed):
    def run(ctx):
        pred = predict(ctx.net, ctx.target, ctx.train_end, ctx.cfg, ctx.pairs,
                       signed=signed, correlations=ctx.correlations)
        return pred.table.scores
    return run


def _mi(mode):
    def run(ctx):
        corr = ctx.correlations if mode != "normal" else None
        return predict_mi(ctx.net, ctx.target, ctx.train_end, mode, ctx.cfg, ctx.pairs, corr).scores
    return run


def _single(metric):
    return lambda ctx: score_pairs(ctx.train_view(), metric, ctx.pairs)


def _aggregate(kind):
    def run(ctx):
        views = [ctx.train_view(name) for name in ctx.net.layer_names]
        fn = baselines.average_aggregation if kind == "avg" else baselines.entropy_aggregation
        tables = [fn(baselines.score_cube(views, m, ctx.pairs)) for m in ctx.cfg.metrics]
        return sum(rankdata(t, method="average") - 1.0 for t in tables)
    return run


def _multiplex(metric):
    return lambda ctx: baselines.multiplex_metric(ctx.train_view(), ctx.predictor_views(),
                                                  metric, ctx.pairs)


METHODS = {
    "smlp": _pipeline(True),
    "mlp": _pipeline(False),
    "mi-n": _mi("normal"),
    "mi-cn": _mi("core"),
    "mi-gn": _mi("global"),
    **{m.lower(): _single(m) for m in DEFAULT_METRICS},
    "avg-agg": _aggregate("avg"),
    "ent-agg": _aggregate("ent"),
    **{f"m{m.lower()}": _multiplex(m) for m in baselines.MULTIPLEX_METRICS},
}
METHOD_GRID = tuple(METHODS)


def method_id(name):
    key = str(name).lower()
    if key not in METHODS:
        raise DataError(f"unknown method {name!r}; choose from {list(METHODS)}")
    return key


@dataclass
class EvalReport:
    target: str
    method: str
    auroc: float
    fpr: list
    tpr: list
    n_pos: int
    n_neg: int
    train_end: int
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def evaluate_split(net, split, methods, cfg=PipelineConfig(), seed=0, meta=None):
    ctx = MethodContext(net, split.target, split.train_end, split.pairs, cfg)
    reports = []
    for name in methods:
        key = method_id(name)
        scores = METHODS[key](ctx)
        fpr, tpr = roc_curve(scores, split.labels)
        n_pos = int(split.labels.sum())
        reports.append(EvalReport(split.target, key, auroc(scores, split.labels),
                                  fpr.tolist(), tpr.tolist(), n_pos, len(split.labels) - n_pos,
                                  split.train_end, seed, dict(meta or {})))
    return reports


def run_experiment(net, methods, specs, targets, cfg=PipelineConfig(), seed=0, meta=None):
    """Evaluate ``methods`` on every (target, split) pair; degenerate splits are skipped."""
    reports = []
    for target in targets:
        for spec in specs:
            try:
                split = make_split(net, target, spec)
            except DataError as exc:
                logger.warning("skipping split %s on %r: %s", spec.train_end, target, exc)
                continue
            reports.extend(evaluate_split(net, split, methods, cfg, seed, meta))
    return reports


def summarize(reports):
    """Mean, population std and count of AUROC per (method, target), grid order kept."""
    groups = {}
    for r in reports:
        groups.setdefault((r.method, r.target), []).append(r.auroc)
    rows = []
    for (method, target), vals in groups.items():
        arr = np.array(vals)
        rows.append({"method": method, "target": target, "mean": float(arr.mean()),
                     "std": float(arr.std()), "n_runs": len(vals)})
    best = {}
    for row in rows:
        if row["target"] not in best or row["mean"] > best[row["target"]]:
            best[row["target"]] = row["mean"]
    for row in rows:
        row["best"] = row["mean"] == best[row["target"]]
    return rows

