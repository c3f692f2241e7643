"""Sign-aware multiplex link prediction.

For every training snapshot the target layer is reweighted by its
co-presence in the other layers, each metric is scored on the candidate
pairs, the per-pair series are forecast with exponential smoothing, and
the per-metric rankings are fused with Borda counting.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .exceptions import ConfigError, DataError
from .graph import Snapshot, merge_views
from .metrics import DEFAULT_METRICS, Ranking, ScoreTable, as_pairs, metric_id, non_edges, score_pairs
from .mutual_info import NEGATIVE, NEUTRAL, POSITIVE, MIConfig, correlate, mi_scores

logger = logging.getLogger(__name__)

NEUTRAL_POLICIES = ("positive", "ignore")
WEIGHT_MODES = ("sign", "magnitude")
SERIES_VIEWS = ("cumulative", "snapshot")


@dataclass
class LayerWeightPlan:
    weights: dict = field(default_factory=dict)
    omega: float = 0.5
    w_min: float = 0.1

    def __post_init__(self):
        if not 0 < self.omega <= 1:
            raise ConfigError("omega must lie in (0, 1]")
        if self.w_min < 0:
            raise ConfigError("w_min must be non-negative")

    @classmethod
    def from_correlations(cls, correlations, omega=0.5, w_min=0.1,
                          neutral_policy="positive", weight_mode="sign"):
        """Signed layer weights.

        ``neutral_policy="positive"`` treats Neutral layers like Positive
        ones, so a network without Negative layers reweights exactly as the
        unsigned variant does. ``weight_mode="magnitude"`` scales ``omega``
        by the winning relative MI shift, capped at 1.
        """
        if neutral_policy not in NEUTRAL_POLICIES:
            raise ConfigError(f"neutral_policy must be one of {NEUTRAL_POLICIES}")
        if weight_mode not in WEIGHT_MODES:
            raise ConfigError(f"weight_mode must be one of {WEIGHT_MODES}")
        weights = {}
        for c in correlations:
            sign = c.sign
            if sign == NEUTRAL:
                if neutral_policy == "ignore":
                    continue
                sign = POSITIVE
            scale = 1.0
            if weight_mode == "magnitude":
                delta = c.delta_core if sign == NEGATIVE else c.delta_global
                scale = min(1.0, abs(delta))
            weights[c.predictor] = (-1.0 if sign == NEGATIVE else 1.0) * omega * scale
        return cls(weights, omega, w_min)


def reweight_target(net, target, plan, t, cumulative=True):
    """Target view at ``t`` with ``w' = max(w_min, w * (1 + sum lambda * co-present))``.

    Co-presence is checked against the predictor views built the same way
    as the target view (cumulative or single snapshot).
    """
    g = net.view(target, t, cumulative)
    if not plan.weights:
        return g
    views = {name: net.view(name, t, cumulative) for name in plan.weights}
    pairs = {}
    for key, w in g.undirected.items():
        factor = 1.0 + sum(lam for name, lam in plan.weights.items()
                           if key in views[name].undirected)
        pairs[key] = max(plan.w_min, w * factor)
    return Snapshot.from_undirected(g.n_nodes, pairs, layer=g.layer, index=g.index)


@dataclass(frozen=True)
class DecayConfig:
    beta: float = 0.4

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ConfigError("smoothing factor must lie in (0, 1]")


def decay_forecast(series, cfg=DecayConfig()):
    """Simple exponential smoothing; the last level is the one-step forecast.

    ``series`` may be 1-d or stacked along axis 0 to forecast many series.
    """
    arr = np.asarray(series, dtype=float)
    if arr.shape[0] == 0:
        raise DataError("cannot forecast an empty series")
    level = arr[0].copy() if arr.ndim > 1 else float(arr[0])
    for x in arr[1:]:
        level = cfg.beta * x + (1.0 - cfg.beta) * level
    return level


def borda_points(scores):
    """Points ``n - rank`` of each item in one list, ties at the mean position."""
    return rankdata(np.asarray(scores, dtype=float), method="average") - 1.0


def borda_aggregate(rankings):
    """Fuse rankings over the same pair set; residual ties go to the smaller pair."""
    rankings = list(rankings)
    if not rankings:
        raise DataError("borda aggregation needs at least one ranking")
    ref = rankings[0]
    ref_set = ref.pair_set()
    order = np.lexsort((ref.pairs[:, 1], ref.pairs[:, 0]))
    pairs = ref.pairs[order]
    total = np.zeros(len(pairs))
    for r in rankings:
        if len(r) != len(ref) or r.pair_set() != ref_set:
            raise DataError("rankings cover different pair sets")
        idx = np.lexsort((r.pairs[:, 1], r.pairs[:, 0]))
        total += r.points()[idx]
    return Ranking.from_scores(pairs, total)


def borda_scores(score_arrays):
    """Borda totals for aligned score arrays (one array per list)."""
    return sum(borda_points(s) for s in score_arrays)


@dataclass
class PipelineConfig:
    metrics: tuple = DEFAULT_METRICS
    mi: MIConfig = field(default_factory=MIConfig)
    tau: float = 0.05
    omega: float = 0.5
    w_min: float = 0.1
    neutral_policy: str = "positive"
    weight_mode: str = "sign"
    decay: DecayConfig = field(default_factory=DecayConfig)
    series_view: str = "cumulative"
    correlation_view: str = "snapshot"

    def __post_init__(self):
        self.metrics = tuple(metric_id(m) for m in self.metrics)
        if not self.metrics:
            raise ConfigError("at least one metric is required")
        if self.series_view not in SERIES_VIEWS or self.correlation_view not in SERIES_VIEWS:
            raise ConfigError(f"views must be one of {SERIES_VIEWS}")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        LayerWeightPlan(omega=self.omega, w_min=self.w_min)
        if self.neutral_policy not in NEUTRAL_POLICIES:
            raise ConfigError(f"neutral_policy must be one of {NEUTRAL_POLICIES}")
        if self.weight_mode not in WEIGHT_MODES:
            raise ConfigError(f"weight_mode must be one of {WEIGHT_MODES}")


@dataclass
class Prediction:
    target: str
    snapshot: int
    ranking: Ranking
    forecasts: dict
    correlations: list
    table: ScoreTable = None


def layer_correlations(net, target, train_end, cfg=PipelineConfig()):
    """Correlation of every other layer with the target over snapshots ``0..=train_end``."""
    out = []
    cumulative = cfg.correlation_view == "cumulative"
    for name in net.layer_names:
        if name == target:
            continue
        corr, _ = correlate(net, target, name, range(train_end + 1), cfg.mi, cfg.tau, cumulative)
        out.append(corr)
    return out


def _check_train(net, target, train_end):
    net.layer(target)
    if not 0 <= train_end < net.n_snapshots:
        raise DataError(f"train end {train_end} outside snapshot range [0, {net.n_snapshots - 1}]")


def candidate_pairs(net, target, train_end, candidates=None):
    if candidates is None:
        pairs = non_edges(net.view(target, train_end, cumulative=True))
    else:
        pairs = as_pairs(candidates, net.n_nodes)
    if len(pairs) == 0:
        raise DataError("no candidate pairs")
    return pairs


def forecast_metrics(net, target, train_end, pairs, plan, cfg=PipelineConfig()):
    """Smoothed per-metric scores for ``pairs`` over the training window."""
    cumulative = cfg.series_view == "cumulative"
    series = {m: [] for m in cfg.metrics}
    for t in range(train_end + 1):
        g = reweight_target(net, target, plan, t, cumulative)
        for m in cfg.metrics:
            series[m].append(score_pairs(g, m, pairs))
    return {m: decay_forecast(np.vstack(v), cfg.decay) for m, v in series.items()}


def predict(net, target, train_end, cfg=PipelineConfig(), candidates=None,
            signed=True, correlations=None):
    """Rank candidate pairs for snapshot ``train_end + 1`` of ``target``.

    ``signed=False`` forces every predictor layer Positive (the unsigned
    variant). Precomputed ``correlations`` may be passed to avoid
    recomputing them.
    """
    _check_train(net, target, train_end)
    pairs = candidate_pairs(net, target, train_end, candidates)
    if correlations is None:
        correlations = layer_correlations(net, target, train_end, cfg)
    used = correlations
    if not signed:
        used = [_forced(c, POSITIVE) for c in correlations]
    plan = LayerWeightPlan.from_correlations(used, cfg.omega, cfg.w_min,
                                             cfg.neutral_policy, cfg.weight_mode)
    forecasts = forecast_metrics(net, target, train_end, pairs, plan, cfg)
    totals = borda_scores(forecasts.values())
    ranking = Ranking.from_scores(pairs, totals)
    tables = {m: ScoreTable(pairs, s, metric=m) for m, s in forecasts.items()}
    name = "SMLP" if signed else "MLP"
    return Prediction(target, train_end + 1, ranking, tables, list(correlations),
                      ScoreTable(pairs, totals, metric=name))


def _forced(corr, sign):
    from dataclasses import replace

    return replace(corr, sign=sign)


def mi_predictor_view(net, target, train_end, correlations):
    """Cumulative view of the layers read as Positive, else of all other layers."""
    others = [c.predictor for c in correlations if c.sign == POSITIVE]
    if not others:
        others = [n for n in net.layer_names if n != target]
    if not others:
        return None
    views = [net.view(n, train_end, cumulative=True) for n in others]
    return views[0] if len(views) == 1 else merge_views(views)


def predict_mi(net, target, train_end, mode="normal", cfg=PipelineConfig(),
               candidates=None, correlations=None):
    """Single MI score table on the cumulative training view."""
    _check_train(net, target, train_end)
    pairs = candidate_pairs(net, target, train_end, candidates)
    g = net.view(target, train_end, cumulative=True)
    view = None
    if mode != "normal" and cfg.mi.predictor:
        view = net.view(cfg.mi.predictor, train_end, cumulative=True)
    elif mode != "normal":
        if correlations is None:
            correlations = layer_correlations(net, target, train_end, cfg)
        view = mi_predictor_view(net, target, train_end, correlations)
        if view is None:
            raise DataError(f"{mode} neighborhood needs at least two layers")
    mcfg = MIConfig(cfg.mi.base, cfg.mi.eps, mode, cfg.mi.predictor, cfg.mi.estimator)
    return mi_scores(g, pairs, mcfg, view)
