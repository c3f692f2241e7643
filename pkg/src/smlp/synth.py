"""Seeded synthetic multiplex networks with known layer correlation.

The base layer is observed from a latent relationship graph. The latent
graph starts from one of three models and grows every step by a fraction
``grow`` of its size (new ties close triangles inside communities, follow
degree for the ``pa`` model, and are uniform otherwise). Each snapshot
shows every latent tie with probability ``activity`` (ties born this step
always show) plus ``noise`` transient edges outside the latent graph.

Derived layers:

positive
    every latent tie is copied with probability ``rho`` and ``eta * |E|``
    uniform random edges are added.
negative
    ``|E|`` pairs are drawn uniformly from pairs absent from the base
    snapshot; each one is relocated onto a random base edge with
    probability ``1 - rho``. ``eta`` is not used.

With ``activity=1``, ``noise=0`` and ``grow=0`` the base snapshots equal the
latent graph, so a positive layer with ``rho=1, eta=0`` copies the base.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import ConfigError
from .graph import MultiplexNetwork, write_edge_list

MODELS = ("uniform", "pa", "community")
MODES = ("positive", "negative")


@dataclass(frozen=True)
class DerivedLayer:
    name: str
    mode: str
    rho: float = 0.9
    eta: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"derived layer mode must be one of {MODES}")
        for key in ("rho", "eta"):
            if not 0 <= getattr(self, key) <= 1:
                raise ConfigError(f"{key} must lie in [0, 1]")


def _default_layers():
    return (DerivedLayer("messages", "positive", 0.9, 0.02),
            DerivedLayer("raids", "negative", 0.9, 0.0))


@dataclass(frozen=True)
class SynthSpec:
    n: int = 200
    T: int = 10
    model: str = "community"
    p: float = 0.05
    m: int = 2
    communities: int = 10
    p_in: float = 0.15
    p_out: float = 0.003
    grow: float = 0.08
    activity: float = 0.2
    noise: float = 0.1
    base_layer: str = "trades"
    layers: tuple = field(default_factory=_default_layers)
    weight_rate: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 4:
            raise ConfigError("need at least 4 nodes")
        if self.T < 1:
            raise ConfigError("need at least one snapshot")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        for key in ("p", "p_in", "p_out", "activity"):
            if not 0 <= getattr(self, key) <= 1:
                raise ConfigError(f"{key} must lie in [0, 1]")
        if self.grow < 0 or self.noise < 0 or self.weight_rate < 0:
            raise ConfigError("grow, noise and weight_rate must be non-negative")
        if self.model == "pa" and not 1 <= self.m < self.n:
            raise ConfigError("pa model needs 1 <= m < n")
        if not 1 <= self.communities <= self.n:
            raise ConfigError("communities must lie in [1, n]")
        layers = tuple(l if isinstance(l, DerivedLayer) else DerivedLayer(**l) for l in self.layers)
        object.__setattr__(self, "layers", layers)
        names = [self.base_layer] + [l.name for l in layers]
        if len(set(names)) != len(names):
            raise ConfigError("layer names must be unique")

    def to_dict(self):
        d = asdict(self)
        d["layers"] = [asdict(l) for l in self.layers]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown synth keys: {sorted(unknown)}")
        if "layers" in d:
            try:
                d["layers"] = tuple(DerivedLayer(**l) for l in d["layers"])
            except TypeError as exc:
                raise ConfigError(f"bad derived layer: {exc}") from None
        return cls(**d)

    def ground_truth(self):
        return {l.name: l.mode for l in self.layers}


class _Pairs:
    """Index of the ``n(n-1)/2`` unordered pairs."""

    def __init__(self, n):
        self.n = n
        self.u, self.v = np.triu_indices(n, 1)
        self.size = len(self.u)

    def matrix(self, mask):
        a = np.zeros((self.n, self.n), dtype=np.int64)
        a[self.u[mask], self.v[mask]] = 1
        return a + a.T


def _initial(spec, pairs, rng, community):
    if spec.model == "uniform":
        return rng.random(pairs.size) < spec.p
    if spec.model == "community":
        same = community[pairs.u] == community[pairs.v]
        return rng.random(pairs.size) < np.where(same, spec.p_in, spec.p_out)
    # Barabasi-Albert: seed clique on m+1 nodes, then degree-proportional attachment
    n, m = spec.n, spec.m
    adj = np.zeros((n, n), dtype=bool)
    adj[:m + 1, :m + 1] = True
    np.fill_diagonal(adj, False)
    deg = adj.sum(axis=1).astype(float)
    for new in range(m + 1, n):
        w = deg[:new] / deg[:new].sum()
        targets = rng.choice(new, size=m, replace=False, p=w)
        adj[new, targets] = adj[targets, new] = True
        deg[targets] += 1
        deg[new] += m
    return adj[pairs.u, pairs.v]


def _grow(spec, pairs, latent, rng, community):
    count = int(round(spec.grow * latent.sum()))
    free = ~latent
    if spec.model == "community":
        a = pairs.matrix(latent)
        cn = (a @ a)[pairs.u, pairs.v]
        same = community[pairs.u] == community[pairs.v]
        w = np.where(free & same, cn + 0.2, 0.0)
    elif spec.model == "pa":
        deg = pairs.matrix(latent).sum(axis=1)
        w = np.where(free, (deg[pairs.u] + 1.0) * (deg[pairs.v] + 1.0), 0.0)
    else:
        w = free.astype(float)
    count = min(count, int(np.count_nonzero(w)))
    born = np.zeros(pairs.size, dtype=bool)
    if count:
        born[rng.choice(pairs.size, size=count, replace=False, p=w / w.sum())] = True
    return born


def _uniform_outside(excluded, count, rng):
    pool = np.flatnonzero(~excluded)
    if count > len(pool):
        raise ConfigError(f"infeasible: {count} edges requested but only {len(pool)} pairs free")
    out = np.zeros(len(excluded), dtype=bool)
    out[rng.choice(pool, size=count, replace=False)] = True
    return out


def generate_masks(spec):
    """Per-snapshot edge masks over the pair index: ``{layer: [mask_t]}``."""
    rng = np.random.default_rng(spec.seed)
    pairs = _Pairs(spec.n)
    community = np.arange(spec.n) * spec.communities // spec.n
    latent = _initial(spec, pairs, rng, community)
    out = {spec.base_layer: []}
    out.update({l.name: [] for l in spec.layers})
    for t in range(spec.T):
        born = np.zeros(pairs.size, dtype=bool)
        if t > 0:
            born = _grow(spec, pairs, latent, rng, community)
            latent = latent | born
        active = latent & ((rng.random(pairs.size) < spec.activity) | born)
        base = active | _uniform_outside(latent, int(round(spec.noise * active.sum())), rng)
        out[spec.base_layer].append(base)
        n_base = int(base.sum())
        for layer in spec.layers:
            if layer.mode == "positive":
                mask = latent & (rng.random(pairs.size) < layer.rho)
                mask |= _uniform_outside(mask, int(round(layer.eta * n_base)), rng)
            else:
                mask = _uniform_outside(base, n_base, rng)
                base_idx = np.flatnonzero(base)
                chosen = np.flatnonzero(mask)
                move = rng.random(len(chosen)) < 1.0 - layer.rho
                if move.any():
                    mask[chosen[move]] = False
                    mask[rng.choice(base_idx, size=int(move.sum()))] = True
            out[layer.name].append(mask)
    return pairs, out


def generate(spec):
    """Build the multiplex network described by ``spec``; deterministic in ``spec.seed``."""
    pairs, masks = generate_masks(spec)
    rng = np.random.default_rng([spec.seed, 1])
    labels = [f"n{i}" for i in range(spec.n)]
    rows = []
    for name, series in masks.items():
        for t, mask in enumerate(series):
            idx = np.flatnonzero(mask)
            weights = 1 + rng.poisson(spec.weight_rate, size=len(idx))
            rows.extend((labels[pairs.u[i]], labels[pairs.v[i]], float(w), name, t)
                        for i, w in zip(idx, weights))
    return MultiplexNetwork.from_rows(rows, n_snapshots=spec.T, layer_order=list(masks),
                                      nodes=labels)


def export(net, path):
    write_edge_list(net, path)
