import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import network
from smlp.evaluation import (
    METHOD_GRID, SplitSpec, auroc, evaluate_split, make_split, roc_area, roc_curve,
    run_experiment, summarize,
)
from smlp.exceptions import DataError
from smlp.metrics import ScoreTable
from smlp.synth import SynthSpec, generate

a, b, c, d = 0, 1, 2, 3


def toy():
    return network({"x": [{(a, b): 1.0}, {(a, b): 1.0, (a, c): 1.0}]}, n=4, snapshots=2)


class TestSplit:
    def test_hand_enumeration(self):
        split = make_split(toy(), "x", SplitSpec(0, "all"))
        pos = {tuple(p) for p, l in zip(split.pairs.tolist(), split.labels) if l}
        neg = {tuple(p) for p, l in zip(split.pairs.tolist(), split.labels) if not l}
        assert pos == {(a, c)}
        assert neg == {(a, d), (b, c), (b, d), (c, d)}

    def test_no_new_links(self):
        net = network({"x": [{(a, b): 1.0}, {(a, b): 2.0}]}, n=4, snapshots=2)
        with pytest.raises(DataError, match="degenerate"):
            make_split(net, "x", SplitSpec(0, "all"))

    def test_no_test_snapshot(self):
        with pytest.raises(DataError):
            make_split(toy(), "x", SplitSpec(1))

    def test_sampling_deterministic_and_ratio(self):
        net = generate(SynthSpec(n=80, T=3, seed=1))
        s1 = make_split(net, "trades", SplitSpec(1, "sampled", 10, seed=4))
        s2 = make_split(net, "trades", SplitSpec(1, "sampled", 10, seed=4))
        s3 = make_split(net, "trades", SplitSpec(1, "sampled", 10, seed=5))
        assert np.array_equal(s1.pairs, s2.pairs)
        assert not np.array_equal(s1.pairs, s3.pairs)
        n_pos = int(s1.labels.sum())
        assert len(s1.labels) - n_pos == 10 * n_pos

    def test_bad_spec(self):
        with pytest.raises(DataError):
            SplitSpec(0, "weird")


class TestAUROC:
    def test_perfect(self):
        assert auroc([0.9, 0.8, 0.1, 0.0], [1, 1, 0, 0]) == 1.0

    def test_constant(self):
        assert auroc([1, 1, 1, 1], [1, 0, 1, 0]) == 0.5

    def test_single_class(self):
        with pytest.raises(DataError):
            auroc([0.1, 0.2], [1, 1])

    def test_score_table_and_dict(self):
        table = ScoreTable([(0, 1), (0, 2)], [0.3, 0.9])
        assert auroc(table, {(0, 1): 0, (0, 2): 1}) == 1.0

    def test_random_against_pairwise(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            s = rng.integers(0, 5, n).astype(float)
            y = rng.integers(0, 2, n)
            if y.min() == y.max():
                continue
            assert abs(auroc(s, y) - oracles.pairwise_auroc(s, y)) <= 1e-12
            fpr, tpr = roc_curve(s, y)
            assert abs(roc_area(fpr, tpr) - auroc(s, y)) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(-1000, 1000), st.integers(0, 1)), min_size=2, max_size=50))
    def test_monotone_transform_and_label_swap(self, data):
        s = np.array([v for v, _ in data], dtype=float)
        y = np.array([l for _, l in data])
        if y.min() == y.max():
            return
        base = auroc(s, y)
        assert auroc(s ** 3 + 5 * s - 7, y) == pytest.approx(base, abs=1e-12)
        assert auroc(s, 1 - y) == pytest.approx(1 - base, abs=1e-12)


class TestROC:
    def test_perfect(self):
        fpr, tpr = roc_curve([3, 2, 1], [1, 0, 0])
        assert list(zip(fpr.tolist(), tpr.tolist())) == [(0, 0), (0, 1), (0.5, 1), (1, 1)]

    def test_perfect_two_levels(self):
        fpr, tpr = roc_curve([1, 1, 0, 0], [1, 1, 0, 0])
        assert list(zip(fpr.tolist(), tpr.tolist())) == [(0, 0), (0, 1), (1, 1)]

    def test_single_threshold(self):
        fpr, tpr = roc_curve([2, 2, 2], [1, 0, 0])
        assert list(zip(fpr.tolist(), tpr.tolist())) == [(0, 0), (1, 1)]

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 1)), min_size=2, max_size=60))
    def test_monotone_endpoints(self, data):
        s = np.array([v for v, _ in data], dtype=float)
        y = np.array([l for _, l in data])
        if y.min() == y.max():
            return
        fpr, tpr = roc_curve(s, y)
        assert (fpr[0], tpr[0]) == (0, 0) and (fpr[-1], tpr[-1]) == (1, 1)
        assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
        assert len(fpr) == len(np.unique(s)) + 1


class TestExperiment:
    def test_single_split_single_method(self):
        net = generate(SynthSpec(n=60, T=3, seed=2))
        reports = run_experiment(net, ["cn"], [SplitSpec(1, "all")], ["trades"])
        assert len(reports) == 1 and 0 <= reports[0].auroc <= 1

    def test_std_zero_when_repeated(self):
        net = generate(SynthSpec(n=60, T=3, seed=2))
        spec = SplitSpec(1, "all")
        reports = run_experiment(net, ["aa"], [spec, spec], ["trades"])
        assert summarize(reports)[0]["std"] == 0.0

    def test_full_grid_row_count(self):
        net = generate(SynthSpec(n=60, T=4, seed=3))
        reports = run_experiment(net, METHOD_GRID, [SplitSpec(2)], list(net.layer_names))
        rows = summarize(reports)
        assert len(METHOD_GRID) == 19
        targets = {r.target for r in reports}
        assert len(rows) == len(METHOD_GRID) * len(targets)

    def test_degenerate_split_skipped(self, caplog):
        net = network({"x": [{(a, b): 1.0}, {(a, b): 2.0}, {(a, c): 1.0}], "y": [{}, {}, {}]},
                      n=4, snapshots=3)
        reports = run_experiment(net, ["cn"], [SplitSpec(0, "all"), SplitSpec(1, "all")], ["x"])
        assert [r.train_end for r in reports] == [1]
        assert "skipping split 0" in caplog.text

    def test_reports_reproducible(self):
        net = generate(SynthSpec(n=60, T=4, seed=3))
        r1 = run_experiment(net, ["smlp", "mi-cn"], [SplitSpec(2)], ["trades"])
        r2 = run_experiment(net, ["smlp", "mi-cn"], [SplitSpec(2)], ["trades"])
        assert [x.to_dict() for x in r1] == [x.to_dict() for x in r2]

    def test_unknown_method(self):
        net = generate(SynthSpec(n=30, T=3, seed=3))
        split = make_split(net, "trades", SplitSpec(1, "all"))
        with pytest.raises(DataError, match="unknown method"):
            evaluate_split(net, split, ["katz"])
