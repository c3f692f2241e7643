import json

import pytest
import yaml

from smlp.cli import main
from smlp.config import RunConfig, parse_range
from smlp.exceptions import ConfigError


def run(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump({"synth": {"n": 60, "T": 5}, "target_layer": "trades",
                                    "train_range": "2:3", "seed": 3}))
    return path


@pytest.fixture
def dataset(tmp_path, small_config):
    out = tmp_path / "data"
    assert run(["generate", "--config", str(small_config), "--out", str(out)]) == 0
    return out


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.methods[0] == "smlp" and len(cfg.methods) == 19
        assert cfg.pipeline().omega == 0.5

    def test_unknown_keys(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            RunConfig.from_dict({"colour": 1})
        with pytest.raises(ConfigError, match="unknown keys in mi"):
            RunConfig.from_dict({"mi": {"bogus": 1}})

    def test_bad_values(self):
        for data in ({"methods": ["nope"]}, {"tau": 0}, {"weights": {"omega": 2}},
                     {"synth": {"n": 2}}, {"input": "a.csv", "synth": {}},
                     {"mi": {"neighborhood": "all"}}, {"train_range": "5:2"}):
            with pytest.raises(ConfigError):
                RunConfig.from_dict(data)

    def test_overrides(self):
        cfg = RunConfig().with_overrides(methods="mi-n,mi-cn", tau=0.1,
                                         **{"weights.omega": 0.9, "mi.neighborhood": "core"})
        assert cfg.methods == ["mi-n", "mi-cn"]
        assert cfg.weights.omega == 0.9 and cfg.mi.neighborhood == "core"

    def test_parse_range(self):
        assert parse_range("4:8") == [4, 8]
        assert parse_range("7") == [7, 7]
        assert parse_range([1, 2]) == [1, 2]
        with pytest.raises(ConfigError):
            parse_range("a:b")

    def test_env_out_dir(self, monkeypatch):
        monkeypatch.setenv("SMLP_OUT_DIR", "/tmp/somewhere")
        assert RunConfig().out_dir() == "/tmp/somewhere"
        assert RunConfig(out="x").out_dir() == "x"


class TestCommands:
    def test_generate_manifest(self, dataset, small_config, tmp_path):
        manifest = json.loads((dataset / "manifest.json").read_text())
        assert manifest["seed"] == 3 and manifest["input"]["synth"]["seed"] == 3
        again = tmp_path / "again"
        assert run(["generate", "--config", str(dataset / "manifest.json"), "--out", str(again)]) == 0
        assert (again / "edges.csv").read_bytes() == (dataset / "edges.csv").read_bytes()

    def test_correlate(self, dataset, tmp_path):
        out = tmp_path / "cor"
        edges = dataset / "edges.csv"
        before = edges.read_bytes()
        assert run(["correlate", "--input", str(edges), "--target-layer", "trades",
                    "--out", str(out)]) == 0
        report = json.loads((out / "correlations.json").read_text())
        assert {r["predictor"] for r in report} == {"messages", "raids"}
        assert set(report[0]) >= {"target", "predictor", "mi_normal", "mi_core", "mi_global",
                                  "delta_core", "delta_global", "sign", "tau", "snapshot"}
        lines = (out / "correlation_series.csv").read_text().splitlines()
        assert lines[0] == "target,predictor,snapshot,mode,mi"
        assert edges.read_bytes() == before

    def test_correlate_single_layer(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("a,b,1,x,0\nb,c,1,x,0\n")
        assert run(["correlate", "--input", str(path), "--out", str(tmp_path / "o")]) == 2

    def test_predict_and_rerun(self, dataset, tmp_path):
        edges = str(dataset / "edges.csv")
        for name in ("p1", "p2"):
            assert run(["predict", "--input", edges, "--target-layer", "trades",
                        "--methods", "smlp", "--out", str(tmp_path / name)]) == 0
        a = (tmp_path / "p1" / "prediction.csv").read_bytes()
        assert a == (tmp_path / "p2" / "prediction.csv").read_bytes()
        assert a.decode().splitlines()[0] == "rank,source,target,score"
        m = json.loads((tmp_path / "p1" / "manifest.json").read_text())
        assert m["method"] == "smlp" and len(m["correlations"]) == 2

    def test_predict_mi_modes_differ(self, dataset, tmp_path):
        edges = str(dataset / "edges.csv")
        outs = {}
        for mode in ("mi-n", "mi-cn"):
            assert run(["predict", "--input", edges, "--methods", mode,
                        "--out", str(tmp_path / mode)]) == 0
            outs[mode] = (tmp_path / mode / "prediction.csv").read_text()
        assert outs["mi-n"] != outs["mi-cn"]

    def test_predict_single_layer(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("a,b,1,x,0\nb,c,1,x,0\nc,d,1,x,1\n")
        assert run(["predict", "--input", str(path), "--out", str(tmp_path / "o")]) == 0
        assert "single-layer" in (tmp_path / "o" / "manifest.json").read_text()

    def test_benchmark_deterministic(self, small_config, tmp_path):
        for name in ("b1", "b2"):
            assert run(["benchmark", "--config", str(small_config), "--methods", "smlp,mlp,cn",
                        "--out", str(tmp_path / name)]) == 0
        for f in ("report.csv", "report.json"):
            assert (tmp_path / "b1" / f).read_bytes() == (tmp_path / "b2" / f).read_bytes()
        rows = (tmp_path / "b1" / "report.csv").read_text().splitlines()
        assert rows[0] == "method,target,mean,std,n_runs,best" and len(rows) == 4

    def test_exit_codes(self, tmp_path):
        assert run(["predict", "--config", str(tmp_path / "missing.yaml")]) == 1
        bad = tmp_path / "bad.yaml"
        bad.write_text("tau: [1, 2\n")
        assert run(["predict", "--config", str(bad)]) == 1
        assert run(["predict", "--input", str(tmp_path / "none.csv")]) == 2
        malformed = tmp_path / "m.csv"
        malformed.write_text("a,b,oops,x,0\n")
        assert run(["predict", "--input", str(malformed)]) == 2
        assert run(["predict", "--bogus-flag"]) == 1
        assert run(["--help"]) == 0
