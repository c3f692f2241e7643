"""Weighted topological similarity metrics.

Every metric is exposed twice: a scalar ``xx_w(g, x, y)`` for one pair and a
batch kernel used by :func:`score_candidates`, which scores many pairs with
sparse matrix products. Logs are base 2.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra
from scipy.stats import rankdata

from .exceptions import ConvergenceError, DataError

DAMPING = 0.85
PR_TOL = 1e-10
PR_MAX_ITER = 200


def _cached(g, key, fn):
    # snapshots are immutable, so derived arrays can live on the instance
    store = g.__dict__.setdefault("_metric_cache", {})
    if key not in store:
        store[key] = fn()
    return store[key]


def _pair_values(mat, xs, ys):
    if len(xs) == 0:
        return np.zeros(0)
    if sp.issparse(mat):
        return np.asarray(mat.tocsr()[xs, ys]).ravel().astype(float)
    return np.asarray(mat[xs, ys], dtype=float)


def _neighbor_weighted(g, node_weight):
    """``M + M.T`` where ``M = W diag(node_weight) A``.

    Entry (x, y) is the sum over common neighbors z of
    ``(w(x,z) + w(y,z)) * node_weight[z]``.
    """
    m = g.adjacency @ sp.diags(node_weight) @ g.binary
    return (m + m.T).tocsr()


def _cn(g, xs, ys):
    mat = _cached(g, "cn", lambda: _neighbor_weighted(g, np.ones(g.n_nodes)))
    return _pair_values(mat, xs, ys)


def _jc(g, xs, ys):
    s = g.strength
    den = s[xs] + s[ys]
    num = _cn(g, xs, ys)
    out = np.zeros(len(xs))
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def _pa(g, xs, ys):
    s = g.strength
    return s[xs] * s[ys]


def _aa(g, xs, ys):
    def build():
        s = g.strength
        inv = np.zeros_like(s)
        ok = s > 0
        inv[ok] = 1.0 / np.log2(1.0 + s[ok])
        return _neighbor_weighted(g, inv)
    return _pair_values(_cached(g, "aa", build), xs, ys)


def _ra(g, xs, ys):
    def build():
        s = g.strength
        inv = np.zeros_like(s)
        ok = s > 0
        inv[ok] = 1.0 / s[ok]
        return _neighbor_weighted(g, inv)
    return _pair_values(_cached(g, "ra", build), xs, ys)


def pagerank_w(g, damping=DAMPING, tol=PR_TOL, max_iter=PR_MAX_ITER):
    """Weighted PageRank with teleport proportional to weighted degree.

    Mass sitting on nodes without out-links is redistributed through the
    teleport vector, so scores always sum to one. A graph without edges
    falls back to a uniform teleport vector.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    n = g.n_nodes
    if n == 0:
        raise DataError("pagerank of an empty graph")
    key = ("pr", damping, tol, max_iter)

    def run():
        s = g.strength
        total = s.sum()
        teleport = s / total if total > 0 else np.full(n, 1.0 / n)
        out_w = s
        inv = np.zeros(n)
        inv[out_w > 0] = 1.0 / out_w[out_w > 0]
        dangling = out_w == 0
        trans = (sp.diags(inv) @ g.adjacency).T.tocsr()
        pr = np.full(n, 1.0 / n)
        residual = np.inf
        for _ in range(max_iter):
            new = damping * (trans @ pr + pr[dangling].sum() * teleport)
            new += (1.0 - damping) * teleport
            residual = np.abs(new - pr).sum()
            pr = new
            if residual < tol:
                return pr
        raise ConvergenceError(f"pagerank did not converge in {max_iter} iterations", residual)
    return _cached(g, key, run)


def _pr(g, xs, ys):
    pr = pagerank_w(g)
    return pr[xs] * pr[ys]


def _ipd(g, xs, ys):
    out = np.zeros(len(xs))
    if len(xs) == 0 or g.n_edges == 0:
        return out
    sources, inverse = np.unique(xs, return_inverse=True)
    dist = dijkstra(g.adjacency, directed=False, indices=sources)
    d = dist[inverse, ys]
    ok = np.isfinite(d) & (d > 0)
    out[ok] = 1.0 / d[ok]
    return out


def clustering(g):
    """Standard local clustering coefficient on the unweighted topology."""
    def build():
        k = g.degree.astype(float)
        c = np.zeros(g.n_nodes)
        ok = k >= 2
        c[ok] = 2.0 * g.triangles[ok] / (k[ok] * (k[ok] - 1.0))
        return c
    return _cached(g, "clustering", build)


def _pcf(g, xs, ys):
    c = clustering(g)
    return c[xs] * c[ys]


METRICS = {
    "CN": _cn,
    "JC": _jc,
    "PA": _pa,
    "AA": _aa,
    "RA": _ra,
    "PR": _pr,
    "IPD": _ipd,
    "PCF": _pcf,
}
DEFAULT_METRICS = tuple(METRICS)


def metric_id(name):
    key = str(name).upper()
    if key == "PAGERANK":
        key = "PR"
    if key not in METRICS:
        raise DataError(f"unknown metric {name!r}; choose from {sorted(METRICS)}")
    return key


def _scalar(metric, g, x, y):
    if x == y:
        raise DataError("similarity of a node with itself is undefined")
    g._check(x)
    g._check(y)
    return float(METRICS[metric](g, np.array([x]), np.array([y]))[0])


def cn_w(g, x, y):
    return _scalar("CN", g, x, y)


def jc_w(g, x, y):
    return _scalar("JC", g, x, y)


def pa_w(g, x, y):
    return _scalar("PA", g, x, y)


def aa_w(g, x, y):
    return _scalar("AA", g, x, y)


def ra_w(g, x, y):
    return _scalar("RA", g, x, y)


def pr_w(g, x, y):
    return _scalar("PR", g, x, y)


def ipd(g, x, y):
    return _scalar("IPD", g, x, y)


def pcf(g, x, y):
    return _scalar("PCF", g, x, y)


def as_pairs(candidates, n_nodes=None):
    """Canonical ``(m, 2)`` int array, ``x < y``, unique and sorted."""
    arr = np.asarray(list(candidates) if not isinstance(candidates, np.ndarray) else candidates,
                     dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError("candidates must be a sequence of node pairs")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise DataError("candidate set contains a self-pair")
    if n_nodes is not None and (arr.min() < 0 or arr.max() >= n_nodes):
        raise DataError("candidate pair references an unregistered node")
    arr = np.sort(arr, axis=1)
    return np.unique(arr, axis=0)


def non_edges(g):
    """All unordered node pairs without an edge in ``g``, sorted."""
    xs, ys = np.triu_indices(g.n_nodes, 1)
    if g.n_edges:
        present = _pair_values(g.binary, xs, ys) > 0
        xs, ys = xs[~present], ys[~present]
    return np.column_stack([xs, ys]).astype(np.int64)


@dataclass
class ScoreTable:
    """Scores for a set of unordered node pairs (``x < y``)."""

    pairs: np.ndarray
    scores: np.ndarray
    metric: str = ""
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.scores = np.asarray(self.scores, dtype=float).ravel()
        if len(self.pairs) != len(self.scores):
            raise ValueError("pairs and scores differ in length")
        if not np.all(np.isfinite(self.scores)):
            raise DataError(f"{self.metric or 'score'} table has non-finite values")

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, pair):
        x, y = sorted(pair)
        hit = np.flatnonzero((self.pairs[:, 0] == x) & (self.pairs[:, 1] == y))
        if not len(hit):
            raise KeyError(pair)
        return float(self.scores[hit[0]])

    def as_dict(self):
        return {(int(x), int(y)): float(s) for (x, y), s in zip(self.pairs, self.scores)}

    def ranking(self):
        return Ranking.from_scores(self.pairs, self.scores)

    def to_csv(self, path, labels=None):
        from ._io import atomic_writer

        with atomic_writer(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("source", "target", "score"))
            for (x, y), s in zip(self.pairs, self.scores):
                if labels is not None:
                    x, y = labels[x], labels[y]
                w.writerow((x, y, repr(float(s))))


@dataclass
class Ranking:
    """Pairs in descending score order; equal scores share a tie group."""

    pairs: np.ndarray
    scores: np.ndarray
    tie_groups: np.ndarray

    @classmethod
    def from_scores(cls, pairs, scores):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        scores = np.asarray(scores, dtype=float)
        order = np.lexsort((pairs[:, 1], pairs[:, 0], -scores))
        s = scores[order]
        groups = np.concatenate([[0], np.cumsum(s[1:] != s[:-1])]) if len(s) else np.zeros(0, int)
        return cls(pairs[order], s, groups.astype(np.int64))

    def __len__(self):
        return len(self.scores)

    def points(self):
        """Borda points aligned with ``self.pairs``: ``n - rank``, ties averaged."""
        return rankdata(self.scores, method="average") - 1.0

    def pair_set(self):
        return {tuple(p) for p in self.pairs.tolist()}


def score_candidates(g, metric, candidates):
    """Score every candidate pair with one metric on graph ``g``."""
    key = metric_id(metric)
    pairs = as_pairs(candidates, g.n_nodes)
    scores = METRICS[key](g, pairs[:, 0], pairs[:, 1]) if len(pairs) else np.zeros(0)
    prov = {"layer": g.layer, "snapshot": g.index}
    return ScoreTable(pairs, scores, metric=key, provenance=prov)


def score_pairs(g, metric, pairs):
    """Raw kernel call on an already canonical pair array (no copying or sorting)."""
    return METRICS[metric_id(metric)](g, pairs[:, 0], pairs[:, 1])
