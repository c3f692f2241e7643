"""Mutual-information link scoring and layer-correlation sign detection.

Information is measured in bits unless ``MIConfig.base`` says otherwise.
Two estimators are available for the evidence a common neighbor ``z``
carries about a link:

``tan`` (default)
    I(L;z) = mean link self-information over pairs of z's neighbors minus
    I(L|z). The evidence of a neighbor set is the sum of I(L;z) and the
    pair score is ``-I(L|O) = I(L;O) - I(L)``.
``literal``
    I(L|O) is the plain sum of I(L|z) over O and ``I(L;O) = I(L) - I(L|O)``.

``I(L|z)`` is always the clustering estimator ``-log p(L|z)`` with
``p(L|z) = triangles(z) / C(k_z, 2)``. Every term is computed on the mode
graph: the target itself, its intersection with the predictor (core), or
their union (global).
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .exceptions import ConfigError, DataError
from .graph import combine
from .metrics import ScoreTable, as_pairs

logger = logging.getLogger(__name__)

MODES = ("normal", "core", "global")
ESTIMATORS = ("tan", "literal")
POSITIVE, NEGATIVE, NEUTRAL = "Positive", "Negative", "Neutral"


@dataclass(frozen=True)
class MIConfig:
    base: float = 2.0
    eps: float = 1e-10
    mode: str = "normal"
    predictor: str = None
    estimator: str = "tan"

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("probability floor eps must be positive")
        if not self.base > 1:
            raise ConfigError("log base must exceed 1")
        if self.mode not in MODES:
            raise ConfigError(f"neighborhood mode must be one of {MODES}, got {self.mode!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")


def self_information(p, eps=1e-10, base=2.0):
    """``-log_base p`` with ``p`` clamped to ``[eps, 1]``."""
    p = np.clip(p, eps, 1.0)
    out = -np.log(p) / math.log(base)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=1 << 16)
def log_absent(m, kx, ky):
    """Natural log of C(M-ky, kx) / C(M, kx): probability that no slot collides.

    The ratio is symmetric in (kx, ky), so the shorter product is used.
    Returns ``-inf`` when the combination is impossible.
    """
    kx, ky = min(kx, ky), max(kx, ky)
    if kx == 0:
        return 0.0
    if kx > m - ky:
        return -math.inf
    return math.fsum(math.log1p(-ky / (m - i)) for i in range(kx))


def prior_probability(m, kx, ky, eps=1e-10):
    """Link prior ``1 - C(M-ky, kx)/C(M, kx)`` clamped to ``[eps, 1-eps]``."""
    if m < 1:
        raise DataError("link prior needs at least one edge")
    if kx > m or ky > m or kx < 0 or ky < 0:
        raise DataError(f"degrees ({kx}, {ky}) incompatible with M={m}")
    p = -math.expm1(log_absent(int(m), int(kx), int(ky)))
    return min(max(p, eps), 1.0 - eps)


def link_prior(g, x, y, eps=1e-10):
    g._check(x)
    g._check(y)
    return prior_probability(g.n_edges, int(g.degree[x]), int(g.degree[y]), eps)


def _prior_info_table(m, values, eps, base):
    """Self-information of the prior for every pair of degree values."""
    v = [int(a) for a in values]
    out = np.empty((len(v), len(v)))
    for i, a in enumerate(v):
        for j in range(i, len(v)):
            out[i, j] = out[j, i] = self_information(prior_probability(m, a, v[j], eps), eps, base)
    return out


def _prior_info_pairs(g, xs, ys, eps, base):
    k = g.degree
    vals, inv = np.unique(np.concatenate([k[xs], k[ys]]), return_inverse=True)
    table = _prior_info_table(g.n_edges, vals, eps, base)
    return table[inv[:len(xs)], inv[len(xs):]]


def cond_info_vector(g, eps=1e-10, base=2.0):
    """I(L|z) for every node ``z``; ``-log eps`` where ``k_z < 2``."""
    k = g.degree.astype(float)
    p = np.zeros(g.n_nodes)
    ok = k >= 2
    p[ok] = g.triangles[ok] / (k[ok] * (k[ok] - 1.0) / 2.0)
    return self_information(p, eps, base)


def cond_info_given_neighbor(g, z, eps=1e-10, base=2.0):
    g._check(z)
    return float(cond_info_vector(g, eps, base)[z])


def neighbor_info_vector(g, eps=1e-10, base=2.0):
    """Per-node evidence I(L;z) under the ``tan`` estimator (0 where ``k_z < 2``).

    The mean prior over the C(k_z, 2) neighbor pairs is evaluated by grouping
    neighbors on their degree value, which keeps the cost at
    ``O(n * U^2)`` for ``U`` distinct degrees.
    """
    n = g.n_nodes
    out = np.zeros(n)
    if g.n_edges == 0:
        return out
    k = g.degree
    vals, inv = np.unique(k, return_inverse=True)
    table = _prior_info_table(g.n_edges, vals, eps, base)
    onehot = sp.csr_matrix((np.ones(n), (np.arange(n), inv)), shape=(n, len(vals)))
    counts = (g.binary @ onehot).toarray()
    total = np.einsum("ia,ab,ib->i", counts, table, counts) - counts @ np.diag(table)
    pairs = k * (k - 1) / 2.0
    ok = k >= 2
    mean_prior = np.zeros(n)
    mean_prior[ok] = total[ok] / 2.0 / pairs[ok]
    out[ok] = mean_prior[ok] - cond_info_vector(g, eps, base)[ok]
    return out


def mode_graph(g, mode, predictor_view=None):
    """The graph on which neighborhoods and MI terms are evaluated."""
    if mode == "normal":
        return g
    if predictor_view is None:
        raise ConfigError(f"{mode} neighborhood needs a predictor layer")
    return combine(g, predictor_view, "intersection" if mode == "core" else "union")


def _common_neighbor_sum(h, values, xs, ys):
    """Sum of ``values[z]`` over common neighbors of each (x, y) in ``h``."""
    if len(xs) == 0:
        return np.zeros(0)
    a = h.binary
    m = (a @ sp.diags(values) @ a).tocsr()
    return np.asarray(m[xs, ys]).ravel()


def _pair_terms(h, xs, ys, cfg):
    """``(I(L|O), I(L;O))`` per pair on mode graph ``h``."""
    if h.n_edges == 0:
        z = np.zeros(len(xs))
        return z, z.copy()
    prior = _prior_info_pairs(h, xs, ys, cfg.eps, cfg.base)
    if cfg.estimator == "tan":
        mutual = _common_neighbor_sum(h, neighbor_info_vector(h, cfg.eps, cfg.base), xs, ys)
        cond = prior - mutual
    else:
        cond = _common_neighbor_sum(h, cond_info_vector(h, cfg.eps, cfg.base), xs, ys)
        mutual = prior - cond
    return cond, mutual


def mi_link_given_neighbors(g, x, y, neighbors_, cfg=MIConfig()):
    """``(I(L|O), I(L;O))`` for an explicit neighbor set ``O`` on graph ``g``."""
    if x == y:
        raise DataError("mutual information of a node with itself is undefined")
    prior = self_information(link_prior(g, x, y, cfg.eps), cfg.eps, cfg.base)
    zs = np.fromiter(sorted(neighbors_), dtype=np.int64)
    if cfg.estimator == "tan":
        mutual = float(neighbor_info_vector(g, cfg.eps, cfg.base)[zs].sum())
        return prior - mutual, mutual
    cond = float(cond_info_vector(g, cfg.eps, cfg.base)[zs].sum())
    return cond, prior - cond


def mi_scores(g, candidates, cfg=MIConfig(), predictor_view=None):
    """Score table ``-I(L|O)`` for candidate pairs of target view ``g``."""
    pairs = as_pairs(candidates, g.n_nodes)
    h = mode_graph(g, cfg.mode, predictor_view)
    cond, _ = _pair_terms(h, pairs[:, 0], pairs[:, 1], cfg)
    return ScoreTable(pairs, -cond, metric=f"MI-{cfg.mode}",
                      provenance={"layer": g.layer, "snapshot": g.index})


def mi_score(g, x, y, cfg=MIConfig(), predictor_view=None):
    if x == y:
        raise DataError("mutual information of a node with itself is undefined")
    g._check(x)
    g._check(y)
    return float(mi_scores(g, [(x, y)], cfg, predictor_view).scores[0])


def average_layer_mi(g, cfg=MIConfig(), predictor_view=None):
    """Mean of I(L;O) over the edges of target view ``g``."""
    if g.n_edges == 0:
        raise DataError(f"empty layer {g.layer!r} at snapshot {g.index}")
    edges = g.edge_pairs()
    h = mode_graph(g, cfg.mode, predictor_view)
    _, mutual = _pair_terms(h, edges[:, 0], edges[:, 1], cfg)
    return float(math.fsum(mutual) / len(edges))


@dataclass
class LayerCorrelation:
    target: str
    predictor: str
    mi_normal: float
    mi_core: float
    mi_global: float
    delta_core: float
    delta_global: float
    sign: str
    tau: float
    snapshot: object = None

    def to_dict(self):
        return asdict(self)


def relative_delta(value, reference, floor=1e-12):
    if value == reference:
        return 0.0
    return (value - reference) / max(abs(reference), floor)


def sign_of_layer(corr, tau=0.05):
    """Correlation sign from the relative shifts of core and global MI.

    A drop of core MI beyond ``tau`` votes Negative and a rise of global MI
    beyond ``tau`` votes Positive. When both vote, the larger shift wins.
    """
    if not tau > 0:
        raise ConfigError("tau must be positive")
    dc, dg = corr.delta_core, corr.delta_global
    neg, pos = dc < -tau, dg > tau
    if neg and pos:
        return NEGATIVE if abs(dc) > abs(dg) else POSITIVE
    if neg:
        return NEGATIVE
    if pos:
        return POSITIVE
    return NEUTRAL


def layer_mi_readings(net, target, predictor, t, cfg=MIConfig(), cumulative=False):
    """``(mi_normal, mi_core, mi_global)`` at one snapshot selection."""
    g = net.view(target, t, cumulative)
    b = net.view(predictor, t, cumulative)
    return tuple(average_layer_mi(g, _with_mode(cfg, m), b) for m in MODES)


def _with_mode(cfg, mode):
    return MIConfig(cfg.base, cfg.eps, mode, cfg.predictor, cfg.estimator)


def correlate(net, target, predictor, snapshots, cfg=MIConfig(), tau=0.05, cumulative=False):
    """Average the three MI readings over ``snapshots`` and infer the sign.

    Snapshots where the target is empty are skipped with a warning. Returns
    the aggregate :class:`LayerCorrelation` and the per-snapshot readings.
    """
    net.layer(target)
    net.layer(predictor)
    series = []
    for t in snapshots:
        try:
            series.append((t, *layer_mi_readings(net, target, predictor, t, cfg, cumulative)))
        except DataError as exc:
            logger.warning("skipping snapshot %s of %r: %s", t, target, exc)
    if not series:
        raise DataError(f"target layer {target!r} is empty on every requested snapshot")
    arr = np.array([row[1:] for row in series])
    mn, mc, mg = (float(v) for v in arr.mean(axis=0))
    corr = LayerCorrelation(target, predictor, mn, mc, mg,
                            relative_delta(mc, mn), relative_delta(mg, mn), NEUTRAL, tau,
                            snapshot=[int(s[0]) for s in series])
    corr.sign = sign_of_layer(corr, tau)
    return corr, series
