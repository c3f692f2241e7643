"""scikit-learn style front end.

Every predictor is fitted on a :class:`~smlp.graph.MultiplexNetwork`
(training snapshots ``0..=train_end``) and scores candidate pairs for the
next snapshot of the target layer::

    model = SMLP(target_layer="trades").fit(net)
    scores = model.decision_function(pairs)
    ranking = model.predict()          # all non-edges, best first
    auc = model.score(pairs, labels)   # AUROC
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .evaluation import METHODS, MethodContext, auroc
from .metrics import DEFAULT_METRICS, ScoreTable, metric_id
from .mutual_info import MIConfig
from .pipeline import DecayConfig, PipelineConfig, candidate_pairs, layer_correlations
from .validation import check_layer, check_network, check_pairs, check_train_end


class _LinkPredictor(BaseEstimator):
    """Shared fit / score plumbing. Subclasses name a method of the grid."""

    _min_layers = 1
    _needs_correlations = False

    def _method(self):
        raise NotImplementedError

    def _pipeline_config(self):
        return PipelineConfig()

    def fit(self, X, y=None):
        net = check_network(X, self._min_layers)
        self.target_layer_ = check_layer(net, self.target_layer or net.layer_names[0])
        self.train_end_ = check_train_end(net, self.train_end)
        self.config_ = self._pipeline_config()
        self.network_ = net
        if self._needs_correlations and len(net.layers) > 1:
            self.correlations_ = layer_correlations(net, self.target_layer_, self.train_end_,
                                                    self.config_)
        else:
            self.correlations_ = []
        return self

    def _context(self, pairs):
        check_is_fitted(self, "network_")
        pairs = candidate_pairs(self.network_, self.target_layer_, self.train_end_,
                                check_pairs(pairs, self.network_))
        ctx = MethodContext(self.network_, self.target_layer_, self.train_end_, pairs, self.config_)
        ctx._corr = self.correlations_ if self._needs_correlations else None
        return ctx

    def score_table(self, pairs=None):
        ctx = self._context(pairs)
        return ScoreTable(ctx.pairs, METHODS[self._method()](ctx), metric=self._method())

    def decision_function(self, pairs=None):
        """Scores for ``pairs`` in canonical order (``x < y``, sorted)."""
        return self.score_table(pairs).scores

    def predict(self, pairs=None):
        """Candidate pairs ranked best first."""
        return self.score_table(pairs).ranking()

    def score(self, X, y):
        """AUROC of the scores of pairs ``X`` against 0/1 labels ``y``."""
        check_is_fitted(self, "network_")
        items = list(X)
        if items and isinstance(items[0][0], str):
            items = [(self.network_.node_id(a), self.network_.node_id(b)) for a, b in items]
        canon = [tuple(sorted((int(a), int(b)))) for a, b in items]
        if len(set(canon)) != len(canon):
            raise ValueError("pairs must be unique")
        labels = dict(zip(canon, np.asarray(y).astype(int).tolist()))
        return auroc(self.score_table(canon), labels)


class SMLP(_LinkPredictor):
    """Sign-aware multiplex predictor: reweight, score, smooth, Borda-fuse."""

    _needs_correlations = True

    def __init__(self, target_layer=None, train_end=None, metrics=DEFAULT_METRICS, omega=0.5,
                 w_min=0.1, tau=0.05, beta=0.4, neutral_policy="positive", weight_mode="sign",
                 series_view="cumulative", correlation_view="snapshot", estimator="tan",
                 eps=1e-10):
        self.target_layer = target_layer
        self.train_end = train_end
        self.metrics = metrics
        self.omega = omega
        self.w_min = w_min
        self.tau = tau
        self.beta = beta
        self.neutral_policy = neutral_policy
        self.weight_mode = weight_mode
        self.series_view = series_view
        self.correlation_view = correlation_view
        self.estimator = estimator
        self.eps = eps

    signed = True

    def _method(self):
        return "smlp" if self.signed else "mlp"

    def _pipeline_config(self):
        return PipelineConfig(tuple(self.metrics), MIConfig(eps=self.eps, estimator=self.estimator),
                              self.tau, self.omega, self.w_min, self.neutral_policy,
                              self.weight_mode, DecayConfig(self.beta), self.series_view,
                              self.correlation_view)


class MLP(SMLP):
    """Unsigned variant: every other layer counts as positive evidence."""

    signed = False


class MutualInfoLinkPredictor(_LinkPredictor):
    """Score ``-I(L|O)`` under the normal, core or global neighborhood.

    Core and global modes use ``predictor_layer`` when given, otherwise the
    layers detected as positively correlated (or all other layers).
    """

    _needs_correlations = True

    def __init__(self, target_layer=None, train_end=None, neighborhood="normal",
                 predictor_layer=None, estimator="tan", eps=1e-10, base=2.0, tau=0.05):
        self.target_layer = target_layer
        self.train_end = train_end
        self.neighborhood = neighborhood
        self.predictor_layer = predictor_layer
        self.estimator = estimator
        self.eps = eps
        self.base = base
        self.tau = tau

    def _method(self):
        return {"normal": "mi-n", "core": "mi-cn", "global": "mi-gn"}[self.neighborhood]

    def _pipeline_config(self):
        mi = MIConfig(self.base, self.eps, self.neighborhood, self.predictor_layer, self.estimator)
        return PipelineConfig(mi=mi, tau=self.tau)

    def fit(self, X, y=None):
        self._method()
        self._needs_correlations = self.neighborhood != "normal" and not self.predictor_layer
        if self.predictor_layer:
            check_layer(X, self.predictor_layer)
        return super().fit(X, y)


class MetricLinkPredictor(_LinkPredictor):
    """One similarity metric on the cumulative training view of the target."""

    def __init__(self, metric="CN", target_layer=None, train_end=None):
        self.metric = metric
        self.target_layer = target_layer
        self.train_end = train_end

    def _method(self):
        return metric_id(self.metric).lower()


class LayerAggregationPredictor(_LinkPredictor):
    """Average or entropy aggregation of per-layer metric scores, Borda over metrics."""

    def __init__(self, kind="average", metrics=DEFAULT_METRICS, target_layer=None, train_end=None):
        self.kind = kind
        self.metrics = metrics
        self.target_layer = target_layer
        self.train_end = train_end

    def _method(self):
        return {"average": "avg-agg", "entropy": "ent-agg"}[self.kind]

    def _pipeline_config(self):
        return PipelineConfig(metrics=tuple(self.metrics))


class MultiplexMetricPredictor(_LinkPredictor):
    """CN, JC, PA or AA restricted to the core neighborhood."""

    _min_layers = 2
    _needs_correlations = True

    def __init__(self, metric="CN", target_layer=None, train_end=None, tau=0.05):
        self.metric = metric
        self.target_layer = target_layer
        self.train_end = train_end
        self.tau = tau

    def _method(self):
        return "m" + metric_id(self.metric).lower()

    def _pipeline_config(self):
        return PipelineConfig(tau=self.tau)


class LayerSignDetector(TransformerMixin, BaseEstimator):
    """Correlation sign of every other layer against the target.

    ``transform`` returns one row ``(delta_core, delta_global)`` per
    predictor layer, in network layer order.
    """

    def __init__(self, target_layer=None, train_end=None, tau=0.05, estimator="tan", eps=1e-10,
                 view="snapshot"):
        self.target_layer = target_layer
        self.train_end = train_end
        self.tau = tau
        self.estimator = estimator
        self.eps = eps
        self.view = view

    def fit(self, X, y=None):
        net = check_network(X, 2)
        self.target_layer_ = check_layer(net, self.target_layer or net.layer_names[0])
        self.train_end_ = check_train_end(net, self.train_end)
        cfg = PipelineConfig(mi=MIConfig(eps=self.eps, estimator=self.estimator), tau=self.tau,
                             correlation_view=self.view)
        self.correlations_ = layer_correlations(net, self.target_layer_, self.train_end_, cfg)
        self.signs_ = {c.predictor: c.sign for c in self.correlations_}
        return self

    def transform(self, X):
        check_is_fitted(self, "correlations_")
        return np.array([[c.delta_core, c.delta_global] for c in self.correlations_]).reshape(-1, 2)


__all__ = ["SMLP", "MLP", "MutualInfoLinkPredictor", "MetricLinkPredictor",
           "LayerAggregationPredictor", "MultiplexMetricPredictor", "LayerSignDetector"]
