import numpy as np
import pytest

from smlp.exceptions import ConfigError
from smlp.graph import iter_rows
from smlp.synth import DerivedLayer, SynthSpec, generate

STATIC = dict(activity=1.0, noise=0.0, grow=0.0)


def edge_set(net, layer, t=0):
    return set(net.view(layer, t).undirected)


def jaccard(a, b):
    return len(a & b) / len(a | b) if a | b else 1.0


class TestGenerate:
    def test_exact_copy(self):
        spec = SynthSpec(n=50, T=3, layers=(DerivedLayer("copy", "positive", 1.0, 0.0),),
                         seed=1, **STATIC)
        net = generate(spec)
        for t in range(3):
            assert edge_set(net, "copy", t) == edge_set(net, "trades", t)

    def test_full_avoidance(self):
        spec = SynthSpec(n=60, T=4, layers=(DerivedLayer("neg", "negative", 1.0),), seed=2)
        net = generate(spec)
        for t in range(4):
            base, neg = edge_set(net, "trades", t), edge_set(net, "neg", t)
            assert not base & neg
            assert len(neg) == len(base)

    def test_deterministic(self):
        a, b = generate(SynthSpec(seed=9)), generate(SynthSpec(seed=9))
        assert list(iter_rows(a)) == list(iter_rows(b))
        assert list(iter_rows(a)) != list(iter_rows(generate(SynthSpec(seed=10))))

    def test_weights(self):
        net = generate(SynthSpec(n=40, T=2, seed=3))
        w = np.array([r[2] for r in iter_rows(net)])
        assert w.min() >= 1 and np.all(w == np.round(w))

    def test_shape(self):
        net = generate(SynthSpec(n=30, T=5, seed=0))
        assert net.layer_names == ("trades", "messages", "raids")
        assert net.n_snapshots == 5 and net.n_nodes == 30

    def test_latent_growth(self):
        net = generate(SynthSpec(n=100, T=6, activity=1.0, noise=0.0, grow=0.1, seed=4))
        sizes = [net.view("trades", t).n_edges for t in range(6)]
        assert all(b > a for a, b in zip(sizes, sizes[1:]))

    def test_infeasible(self):
        spec = SynthSpec(n=4, T=1, model="uniform", p=1.0, communities=1,
                         layers=(DerivedLayer("neg", "negative", 1.0),), **STATIC)
        with pytest.raises(ConfigError, match="infeasible"):
            generate(spec)

    @pytest.mark.parametrize("kw", [dict(n=3), dict(T=0), dict(model="ws"), dict(p=2.0),
                                    dict(activity=-0.1), dict(communities=0),
                                    dict(layers=(DerivedLayer("trades", "positive"),))])
    def test_validation(self, kw):
        with pytest.raises(ConfigError):
            SynthSpec(**kw)

    def test_derived_validation(self):
        with pytest.raises(ConfigError):
            DerivedLayer("x", "sideways")
        with pytest.raises(ConfigError):
            DerivedLayer("x", "positive", rho=1.5)

    def test_dict_round_trip(self):
        spec = SynthSpec(n=77, seed=5)
        assert SynthSpec.from_dict(spec.to_dict()) == spec
        with pytest.raises(ConfigError):
            SynthSpec.from_dict({"nodes": 3})


def mean_overlap(mode, rho, seeds=20):
    vals = []
    for seed in range(seeds):
        spec = SynthSpec(n=60, T=2, layers=(DerivedLayer("d", mode, rho, 0.05),), seed=seed)
        net = generate(spec)
        vals.append(np.mean([jaccard(edge_set(net, "trades", t), edge_set(net, "d", t))
                             for t in range(2)]))
    return float(np.mean(vals))


class TestCorrelationControl:
    def test_positive_overlap_increases(self):
        vals = [mean_overlap("positive", r) for r in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(b > a for a, b in zip(vals, vals[1:])), vals

    def test_negative_overlap_decreases(self):
        vals = [mean_overlap("negative", r) for r in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(b < a for a, b in zip(vals, vals[1:])), vals

    def test_pa_heavy_tailed(self):
        ratios = []
        for seed in range(5):
            pa = generate(SynthSpec(n=500, T=1, model="pa", m=2, layers=(), seed=seed, **STATIC))
            mean_k = pa.view("trades", 0).degree.mean()
            uni = generate(SynthSpec(n=500, T=1, model="uniform", p=mean_k / 499, layers=(),
                                     seed=seed, **STATIC))
            ratios.append(pa.view("trades", 0).degree.max() / uni.view("trades", 0).degree.max())
        assert np.mean(ratios) > 2
