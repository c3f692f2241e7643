import numpy as np
import pytest
from sklearn.base import clone

from smlp.estimators import (MLP, SMLP, LayerAggregationPredictor, LayerSignDetector,
                             MetricLinkPredictor, MultiplexMetricPredictor,
                             MutualInfoLinkPredictor)
from smlp.evaluation import SplitSpec, make_split
from smlp.exceptions import DataError
from smlp.synth import SynthSpec, generate


@pytest.fixture(scope="module")
def net():
    return generate(SynthSpec(n=120, T=6, seed=11))


@pytest.fixture(scope="module")
def split(net):
    return make_split(net, "trades", SplitSpec(3, seed=11))


ESTIMATORS = [SMLP(target_layer="trades", train_end=3), MLP(target_layer="trades", train_end=3),
              MutualInfoLinkPredictor(target_layer="trades", train_end=3, neighborhood="core"),
              MetricLinkPredictor("AA", target_layer="trades", train_end=3),
              LayerAggregationPredictor("entropy", target_layer="trades", train_end=3),
              MultiplexMetricPredictor("JC", target_layer="trades", train_end=3)]


@pytest.mark.parametrize("est", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_fit_score(est, net, split):
    model = clone(est).fit(net)
    scores = model.decision_function(split.pairs)
    assert scores.shape == (len(split.pairs),) and np.all(np.isfinite(scores))
    auc = model.score(split.pairs, split.labels)
    assert 0.0 <= auc <= 1.0
    ranking = model.predict(split.pairs[:20])
    assert len(ranking) == 20


def test_params_round_trip():
    model = SMLP(omega=0.7, metrics=("CN", "RA"))
    params = model.get_params()
    assert params["omega"] == 0.7 and params["metrics"] == ("CN", "RA")
    other = clone(model).set_params(tau=0.2)
    assert other.tau == 0.2 and model.tau == 0.05


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        SMLP().decision_function()


def test_labels_accepted(net, split):
    model = MetricLinkPredictor("CN", target_layer="trades", train_end=3).fit(net)
    labels = net.registry.labels
    named = [(labels[x], labels[y]) for x, y in split.pairs[:10]]
    np.testing.assert_array_equal(model.decision_function(named),
                                  model.decision_function(split.pairs[:10]))


def test_signs(net):
    det = LayerSignDetector(target_layer="trades", train_end=4).fit(net)
    assert det.signs_ == {"messages": "Positive", "raids": "Negative"}
    X = det.transform(net)
    assert X.shape == (2, 2)
    assert X[0, 1] > 0.05 and X[1, 0] < -0.05


def test_single_layer_collapse():
    from conftest import network
    rng = np.random.default_rng(0)
    snaps = [{(int(a), int(b)): 1.0 for a, b in rng.integers(0, 15, (20, 2)) if a != b}
             for _ in range(4)]
    one = network({"only": snaps}, 15, 4)
    pairs = [(0, 1), (2, 9), (3, 4), (5, 14), (6, 7)]
    a = SMLP(train_end=2).fit(one).decision_function(pairs)
    b = MLP(train_end=2).fit(one).decision_function(pairs)
    np.testing.assert_array_equal(a, b)


def test_bad_inputs(net):
    with pytest.raises(DataError):
        SMLP().fit({"not": "a network"})
    with pytest.raises(DataError):
        SMLP(train_end=99).fit(net)
    with pytest.raises(DataError):
        SMLP(target_layer="nope").fit(net)
