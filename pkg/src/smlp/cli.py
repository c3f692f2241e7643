"""Command-line entry point: ``smlp generate | correlate | predict | benchmark``.

Exit codes: 0 success, 1 configuration or usage error, 2 data error,
3 compute error.
"""

import csv
import io
import logging
import os
import sys

import click

from . import __version__
from ._io import atomic_writer, dumps, sha256_bytes, sha256_file, write_json
from .config import RunConfig
from .evaluation import run_experiment, summarize
from .exceptions import ComputeError, ConfigError, DataError, SMLPError
from .graph import iter_rows, load_edge_list, write_edge_list
from .mutual_info import MODES, correlate
from .pipeline import predict, predict_mi
from .synth import generate

logger = logging.getLogger("smlp")

MI_METHODS = {"normal": "mi-n", "core": "mi-cn", "global": "mi-gn"}


def _load_config(path):
    return RunConfig() if path is None else RunConfig.load(path)


def _network_bytes(net):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for src, dst, wt, layer, t in iter_rows(net):
        w.writerow((src, dst, repr(float(wt)), layer, t))
    return buf.getvalue().encode("utf-8")


def _network(cfg, seed=None):
    """Network plus a description of where it came from."""
    if cfg.input is not None:
        if not os.path.exists(cfg.input):
            raise DataError(f"input file {cfg.input} does not exist")
        return load_edge_list(cfg.input), {"path": cfg.input, "sha256": sha256_file(cfg.input)}
    spec = cfg.synth_spec(seed)
    net = generate(spec)
    return net, {"synth": spec.to_dict(), "sha256": sha256_bytes(_network_bytes(net))}


def _manifest(command, cfg, source, out_dir, outputs):
    return {
        "manifest_version": 1,
        "command": command,
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "input": source,
        "outputs": {name: sha256_file(os.path.join(out_dir, name)) for name in outputs},
    }


def _target(cfg, net):
    name = cfg.target_layer or net.layer_names[0]
    net.layer(name)
    return name


def _common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="YAML run configuration (or a previous manifest)."),
        click.option("--input", "input_path", type=click.Path(dir_okay=False),
                     help="Edge-list CSV; overrides the config input."),
        click.option("--target-layer", help="Layer whose next snapshot is predicted."),
        click.option("--methods", help="Comma-separated method ids."),
        click.option("--train-range", help="Training ends as 'lo:hi' (inclusive)."),
        click.option("--seed", type=int, help="Random seed."),
        click.option("--out", type=click.Path(file_okay=False),
                     help="Output directory (default: $SMLP_OUT_DIR or ./smlp-out)."),
        click.option("--neighborhood", type=click.Choice(MODES), help="MI neighborhood mode."),
        click.option("--tau", type=float, help="Relative threshold of the sign rule."),
        click.option("--omega", type=float, help="Magnitude of signed layer weights."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve(config_path, input_path, target_layer, methods, train_range, seed, out,
             neighborhood, tau, omega):
    cfg = _load_config(config_path)
    if input_path is not None:
        cfg.synth = None
    return cfg.with_overrides(input=input_path, target_layer=target_layer, methods=methods,
                              train_range=train_range, seed=seed, out=out, tau=tau,
                              **{"mi.neighborhood": neighborhood, "weights.omega": omega})


@click.group()
@click.version_option(__version__, prog_name="smlp")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Signed multiplex link prediction."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


@cli.command("generate")
@_common_options
def cmd_generate(**kw):
    """Write a synthetic network as an edge-list CSV plus manifest."""
    cfg = _resolve(**kw)
    if cfg.input is not None:
        raise ConfigError("generate needs a synth spec, not an input file")
    out = cfg.out_dir()
    net, source = _network(cfg)
    write_edge_list(net, os.path.join(out, "edges.csv"))
    write_json(os.path.join(out, "manifest.json"),
               _manifest("generate", cfg, source, out, ["edges.csv"]))
    click.echo(f"wrote {net.n_nodes} nodes, {len(net.layers)} layers, "
               f"{net.n_snapshots} snapshots to {out}")


@cli.command("correlate")
@_common_options
def cmd_correlate(**kw):
    """Average-MI readings and inferred sign of every layer against the target."""
    cfg = _resolve(**kw)
    out = cfg.out_dir()
    net, source = _network(cfg)
    target = _target(cfg, net)
    pcfg = cfg.pipeline()
    if cfg.mi.predictor:
        predictors = [net.layer(cfg.mi.predictor).name]
    else:
        if len(net.layers) < 2:
            raise DataError("correlate needs at least two layers")
        predictors = [n for n in net.layer_names if n != target]
    lo, hi = cfg.train_range or (0, net.n_snapshots - 1)
    if hi >= net.n_snapshots:
        raise ConfigError(f"train range ends at {hi} but the network has {net.n_snapshots} snapshots")
    cumulative = cfg.views.correlation == "cumulative"
    reports, rows = [], []
    for name in predictors:
        corr, series = correlate(net, target, name, range(lo, hi + 1), pcfg.mi, pcfg.tau,
                                 cumulative)
        reports.append(corr.to_dict())
        for t, *values in series:
            for mode, value in zip(MODES, values):
                rows.append((target, name, t, mode, repr(float(value))))
    with atomic_writer(os.path.join(out, "correlation_series.csv")) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("target", "predictor", "snapshot", "mode", "mi"))
        w.writerows(rows)
    write_json(os.path.join(out, "correlations.json"), reports)
    write_json(os.path.join(out, "manifest.json"),
               _manifest("correlate", cfg, source, out, ["correlations.json", "correlation_series.csv"]))
    for r in reports:
        click.echo(f"{r['target']} <- {r['predictor']}: {r['sign']} "
                   f"(delta_core={r['delta_core']:+.3f}, delta_global={r['delta_global']:+.3f})")


@cli.command("predict")
@_common_options
def cmd_predict(**kw):
    """Rank the target layer's non-edges for the snapshot after training."""
    cfg = _resolve(**kw)
    out = cfg.out_dir()
    net, source = _network(cfg)
    target = _target(cfg, net)
    pcfg = cfg.pipeline()
    method = cfg.methods[0]
    if kw.get("neighborhood") and method.startswith("mi-"):
        method = MI_METHODS[cfg.mi.neighborhood]
    train_end = cfg.train_range[1] if cfg.train_range else net.n_snapshots - 1
    if train_end >= net.n_snapshots:
        raise ConfigError(f"train end {train_end} outside the {net.n_snapshots} snapshots")
    correlations = []
    if method in ("smlp", "mlp"):
        pred = predict(net, target, train_end, pcfg, signed=method == "smlp")
        table, correlations = pred.table, pred.correlations
    elif method.startswith("mi-"):
        mode = {v: k for k, v in MI_METHODS.items()}[method]
        table = predict_mi(net, target, train_end, mode, pcfg)
    else:
        raise ConfigError(f"predict supports smlp, mlp and mi-* methods, not {method!r}")
    ranking = table.ranking()
    labels = net.registry.labels
    with atomic_writer(os.path.join(out, "prediction.csv")) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("rank", "source", "target", "score"))
        for i, ((x, y), s) in enumerate(zip(ranking.pairs, ranking.scores), start=1):
            w.writerow((i, labels[x], labels[y], repr(float(s))))
    manifest = _manifest("predict", cfg, source, out, ["prediction.csv"])
    manifest.update(method=method, target=target, train_end=train_end,
                    correlations=[c.to_dict() for c in correlations])
    if len(net.layers) == 1 and method in ("smlp", "mlp"):
        manifest["note"] = "single-layer input: no cross-layer evidence, SMLP equals MLP"
    write_json(os.path.join(out, "manifest.json"), manifest)
    click.echo(f"{method}: ranked {len(ranking)} pairs of {target!r} for snapshot {train_end + 1}")


@cli.command("benchmark")
@_common_options
def cmd_benchmark(**kw):
    """Rolling-origin AUROC of every method; writes report.csv and report.json."""
    cfg = _resolve(**kw)
    out = cfg.out_dir()
    pcfg = cfg.pipeline()
    seeds = cfg.seeds or [cfg.seed]
    reports, sources = [], []
    # the output location does not influence results, so it stays out of the hash
    config_hash = sha256_bytes(dumps({**cfg.to_dict(), "out": None}).encode("utf-8"))
    try:
        cached = None
        for seed in seeds:
            if cfg.input is not None and cached is not None:
                net, source = cached
            else:
                net, source = _network(cfg, seed)
                cached = (net, source)
            sources.append(source)
            targets = [_target(cfg, net)] if cfg.target_layer else list(net.layer_names)
            specs = cfg.split_specs(net.n_snapshots, seed)
            logger.info("seed %d: %d targets x %d splits", seed, len(targets), len(specs))
            reports.extend(run_experiment(net, cfg.methods, specs, targets, pcfg, seed,
                                          {"config_sha256": config_hash}))
    finally:
        _write_benchmark(out, cfg, reports, sources)
    if not reports:
        raise ComputeError("every split was degenerate; no report rows")
    for row in summarize(reports):
        mark = "*" if row["best"] else " "
        click.echo(f"{mark} {row['target']:<12} {row['method']:<8} "
                   f"{row['mean']:.4f} +/- {row['std']:.4f} (n={row['n_runs']})")


def _write_benchmark(out, cfg, reports, sources):
    rows = summarize(reports)
    with atomic_writer(os.path.join(out, "report.csv")) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "target", "mean", "std", "n_runs", "best"))
        for r in rows:
            w.writerow((r["method"], r["target"], repr(r["mean"]), repr(r["std"]),
                        r["n_runs"], int(r["best"])))
    write_json(os.path.join(out, "report.json"),
               {"rows": rows, "runs": [r.to_dict() for r in reports]})
    source = sources[0] if len(sources) == 1 else {"runs": sources}
    write_json(os.path.join(out, "manifest.json"),
               _manifest("benchmark", cfg, source, out, ["report.csv", "report.json"]))


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="smlp", standalone_mode=False)
    except SMLPError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(ConfigError.exit_code)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(DataError.exit_code)
    sys.exit(0)


if __name__ == "__main__":
    main()
