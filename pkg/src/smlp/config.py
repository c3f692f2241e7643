"""Run configuration: a YAML mapping validated before any compute.

Schema (every key optional)::

    input: edges.csv            # edge-list file, or
    synth: {n: 200, T: 10, ...} # synthetic generator spec
    target_layer: trades
    methods: [smlp, mlp, mi-n]
    metrics: [CN, JC, PA, AA, RA, PR, IPD, PCF]
    seed: 0
    seeds: [0, 1, 2]            # benchmark repetitions (regenerates synth input)
    out: results
    train_range: [4, 8]         # rolling origin: train 0..t, test t+1
    split: {policy: sampled, ratio: 10}
    mi: {base: 2, eps: 1.0e-10, neighborhood: core, estimator: tan, predictor: null}
    tau: 0.05
    weights: {omega: 0.5, w_min: 0.1, neutral_policy: positive, mode: sign}
    decay: {beta: 0.4}
    views: {series: cumulative, correlation: snapshot}
"""

import os
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from .evaluation import METHOD_GRID, POLICIES, SplitSpec, method_id
from .exceptions import ConfigError, SMLPError
from .metrics import DEFAULT_METRICS, metric_id
from .mutual_info import ESTIMATORS, MODES, MIConfig
from .pipeline import DecayConfig, PipelineConfig
from .synth import SynthSpec

OUT_ENV = "SMLP_OUT_DIR"


def _section(cls, data, name):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{name} must be a mapping")
    unknown = set(data) - {f.name for f in fields(cls)}
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}")
    return cls(**data)


@dataclass
class MISection:
    base: float = 2.0
    eps: float = 1e-10
    neighborhood: str = "normal"
    estimator: str = "tan"
    predictor: str = None

    def __post_init__(self):
        if self.neighborhood not in MODES:
            raise ConfigError(f"neighborhood must be one of {MODES}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}")
        self.base, self.eps = float(self.base), float(self.eps)


@dataclass
class WeightSection:
    omega: float = 0.5
    w_min: float = 0.1
    neutral_policy: str = "positive"
    mode: str = "sign"


@dataclass
class DecaySection:
    beta: float = 0.4


@dataclass
class ViewSection:
    series: str = "cumulative"
    correlation: str = "snapshot"


@dataclass
class SplitSection:
    policy: str = "sampled"
    ratio: float = 10.0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"split policy must be one of {POLICIES}")
        if not float(self.ratio) > 0:
            raise ConfigError("split ratio must be positive")


@dataclass
class RunConfig:
    input: str = None
    synth: dict = None
    target_layer: str = None
    methods: list = field(default_factory=lambda: list(METHOD_GRID))
    metrics: list = field(default_factory=lambda: list(DEFAULT_METRICS))
    seed: int = 0
    seeds: list = None
    out: str = None
    train_range: list = None
    split: SplitSection = field(default_factory=SplitSection)
    mi: MISection = field(default_factory=MISection)
    tau: float = 0.05
    weights: WeightSection = field(default_factory=WeightSection)
    decay: DecaySection = field(default_factory=DecaySection)
    views: ViewSection = field(default_factory=ViewSection)

    @classmethod
    def from_dict(cls, data):
        data = dict(data or {})
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        sections = {"split": SplitSection, "mi": MISection, "weights": WeightSection,
                    "decay": DecaySection, "views": ViewSection}
        try:
            for key, sec in sections.items():
                data[key] = _section(sec, data.get(key), key)
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        """Read a YAML config, or the config stored in a previous run manifest."""
        try:
            with open(path, encoding="utf-8") as fh:
                data = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from None
        if isinstance(data, dict) and "manifest_version" in data:
            data = data.get("config")
        if data is not None and not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
        return cls.from_dict(data)

    def validate(self):
        if self.input is not None and self.synth is not None:
            raise ConfigError("give either input or synth, not both")
        try:
            self.methods = [method_id(m) for m in _as_list(self.methods)]
            self.metrics = [metric_id(m) for m in _as_list(self.metrics)]
            if self.synth is not None:
                SynthSpec.from_dict(self.synth)
            self.pipeline()
        except SMLPError as exc:
            raise ConfigError(str(exc)) from None
        if not self.methods:
            raise ConfigError("no methods selected")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if self.seeds is not None:
            self.seeds = [int(s) for s in _as_list(self.seeds)]
        if self.train_range is not None:
            self.train_range = parse_range(self.train_range)
        return self

    def with_overrides(self, **kw):
        """Apply non-None flag values; dotted names reach into sections."""
        cfg = self
        for key, value in kw.items():
            if value is None:
                continue
            if "." in key:
                sec, sub = key.split(".", 1)
                cfg = replace(cfg, **{sec: replace(getattr(cfg, sec), **{sub: value})})
            else:
                cfg = replace(cfg, **{key: value})
        return cfg.validate()

    def pipeline(self):
        try:
            return PipelineConfig(
                metrics=tuple(self.metrics),
                mi=MIConfig(self.mi.base, self.mi.eps, "normal", self.mi.predictor, self.mi.estimator),
                tau=float(self.tau), omega=float(self.weights.omega), w_min=float(self.weights.w_min),
                neutral_policy=self.weights.neutral_policy, weight_mode=self.weights.mode,
                decay=DecayConfig(float(self.decay.beta)),
                series_view=self.views.series, correlation_view=self.views.correlation)
        except SMLPError as exc:
            raise ConfigError(str(exc)) from None

    def synth_spec(self, seed=None):
        data = dict(self.synth or {})
        data["seed"] = self.seed if seed is None else seed
        return SynthSpec.from_dict(data)

    def split_specs(self, n_snapshots, seed=None):
        lo, hi = self.train_range or (0, n_snapshots - 2)
        if hi > n_snapshots - 2 or lo < 0:
            raise ConfigError(f"train range {lo}:{hi} leaves no test snapshot "
                              f"(network has {n_snapshots})")
        seed = self.seed if seed is None else seed
        return [SplitSpec(t, self.split.policy, float(self.split.ratio), seed)
                for t in range(lo, hi + 1)]

    def out_dir(self):
        return self.out or os.environ.get(OUT_ENV) or "smlp-out"

    def to_dict(self):
        return asdict(self)


def _as_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


def parse_range(value):
    """``"4:8"``, ``"8"``, ``8`` or ``[4, 8]`` -> ``[lo, hi]`` inclusive."""
    try:
        if isinstance(value, str):
            parts = value.split(":")
            lo, hi = (parts[0], parts[-1]) if len(parts) <= 2 else (None, None)
            lo, hi = int(lo), int(hi)
        elif isinstance(value, int):
            lo = hi = value
        else:
            lo, hi = (int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad train range {value!r}; use 'lo:hi'") from None
    if lo < 0 or hi < lo:
        raise ConfigError(f"bad train range {value!r}")
    return [lo, hi]
