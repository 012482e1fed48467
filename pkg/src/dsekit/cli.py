"""Command-line entry point.

    dsekit compute --input-dir dumps/ --output out/
    dsekit select  --output out/
    dsekit tau     --output out/ --perf perf.csv
    dsekit synth   prop1 --trials 100

Exit codes: 0 success, 1 data or config error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import theory
from .correlation import align_performance, kendall_tau, read_performance_csv
from .dse import CheckpointSeries, MetricConfig, dse_components, dse_series
from .errors import ConfigError, DSEError
from .selection import select_top
from .separability import DEFAULT_SEP_CONFIGS, SeparabilityConfig
from .synth import SCHEDULES, TrajectorySpec, generate_trajectory
from .tensor_io import load_embeddings, save_embeddings

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("dsekit")

EXPERIMENTS = ("prop1", "thm1", "cor1", "ksweep", "trajectory")
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}


@dataclass
class RunConfig:
    input_dir: Path | None = None
    output: Path = Path("dse_out")
    seed: int = 0
    b_prime: int = 2048
    sep_configs: list = field(default_factory=lambda: [list(p) for p in DEFAULT_SEP_CONFIGS])
    lambda_override: float | None = None
    window: int = 2
    top_t: int = 3
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)

    def metric_config(self) -> MetricConfig:
        return MetricConfig(SeparabilityConfig(tuple(map(tuple, self.sep_configs))),
                            self.b_prime)


# flag dest -> RunConfig attribute
_CONFIG_KEYS = {"input_dir": "input_dir", "output": "output", "seed": "seed",
                "b_prime": "b_prime", "sep_configs": "sep_configs",
                "lambda": "lambda_override", "lambda_override": "lambda_override",
                "window": "window", "top_t": "top_t", "jobs": "jobs"}


def parse_sep_configs(text) -> list:
    """``"1:3,8:24"`` -> [[1, 3], [8, 24]]."""
    if isinstance(text, list):
        pairs = text
    else:
        pairs = []
        for item in str(text).split(","):
            b, sep, k = item.strip().partition(":")
            if not sep:
                raise ConfigError(f"bad --sep-configs entry {item!r}; expected B:k")
            pairs.append([b, k])
    try:
        out = [[int(b), int(k)] for b, k in pairs]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad sep_configs {text!r}") from exc
    SeparabilityConfig(tuple(map(tuple, out)))
    return out


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                doc = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for key, value in doc.items():
            attr = _CONFIG_KEYS.get(key.replace("-", "_"))
            if attr is None:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, attr, value)
    for dest, attr in _CONFIG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            setattr(cfg, attr, value)
    cfg.sep_configs = parse_sep_configs(cfg.sep_configs)
    if cfg.input_dir is not None:
        cfg.input_dir = Path(cfg.input_dir)
    cfg.output = Path(cfg.output)
    for name in ("b_prime", "window", "top_t", "jobs"):
        if int(getattr(cfg, name)) < 1:
            raise ConfigError(f"{name} must be positive")
    return cfg


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _component_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source_id", "cls_sep", "m_dim"])
    for r in records:
        w.writerow([r.source_id, repr(r.cls_sep), repr(r.m_dim)])
    return buf.getvalue()


def cmd_compute(cfg: RunConfig) -> int:
    if cfg.input_dir is None:
        print("error: --input-dir is required", file=sys.stderr)
        return 1
    if not cfg.input_dir.is_dir():
        print(f"error: input directory {cfg.input_dir} not found", file=sys.stderr)
        return 1
    paths = sorted(cfg.input_dir.glob("*.npy"), key=lambda p: p.stem)
    if not paths:
        print(f"error: no checkpoints found in {cfg.input_dir}", file=sys.stderr)
        return 1
    mcfg = cfg.metric_config()

    def run(path):
        try:
            return path, dse_components(load_embeddings(path), mcfg, cfg.seed), None
        except DSEError as exc:
            return path, None, exc

    with ThreadPoolExecutor(max_workers=max(1, int(cfg.jobs))) as pool:
        results = list(pool.map(run, paths))

    records = [rec for _, rec, err in results if rec is not None]
    failures = [(p, err) for p, _, err in results if err is not None]
    for p, err in failures:
        print(f"error: {p.name}: {err}", file=sys.stderr)
    _write(cfg.output / "components.csv", _component_csv(records))
    log.info("computed %d checkpoint(s), %d failure(s)", len(records), len(failures))

    status = 1 if failures else 0
    if len(records) >= 2 or (records and cfg.lambda_override is not None):
        series = dse_series(records, cfg.lambda_override)
        _write(cfg.output / "series.json", series.to_json())
        _write(cfg.output / "series.csv", series.to_csv())
        print(f"lambda = {series.lam!r} ({series.lambda_source}); "
              f"{len(records)} checkpoint(s) -> {cfg.output}")
    else:
        print("error: need at least 2 checkpoints to estimate lambda (or pass --lambda)",
              file=sys.stderr)
        status = 1
    return status


def load_series(path) -> CheckpointSeries:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read series {path}: {exc}") from exc
    return CheckpointSeries.from_dict(doc)


def cmd_select(cfg: RunConfig, series_path) -> int:
    series = load_series(series_path)
    result = select_top(series.scores, cfg.window, cfg.top_t)
    ids = series.source_ids
    doc = result.to_dict()
    doc["selected_source_ids"] = [ids[i] for i in result.selected_indices]
    doc["candidate_source_ids"] = [ids[i] for i in result.candidate_indices]
    _write(cfg.output / "selection.json", json.dumps(doc, indent=2) + "\n")
    for sid in doc["selected_source_ids"]:
        print(sid)
    return 0


def cmd_tau(cfg: RunConfig, series_path, perf_csv, column: str = "dse") -> int:
    series = load_series(series_path)
    perf = align_performance(series.source_ids, read_performance_csv(perf_csv))
    if column == "dse":
        metric = series.scores
    else:
        metric = [getattr(r, column) for r in series.records]
    rep = kendall_tau(metric, perf)
    doc = {"metric": column, **rep.to_dict()}
    _write(cfg.output / "tau.json", json.dumps(doc, indent=2) + "\n")
    print(f"tau = {rep.tau:.4f}  p = {rep.p_value:.3g}  (n = {rep.n}, metric = {column})")
    return 0


def _int_list(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_synth(args, cfg: RunConfig) -> int:
    params = vars(args).copy()
    if args.spec:
        try:
            overrides = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read experiment spec {args.spec}: {exc}") from exc
        if "experiment" in overrides and args.experiment is None:
            params["experiment"] = overrides.pop("experiment")
        params.update({k.replace("-", "_"): v for k, v in overrides.items()})
    name = params["experiment"]
    if name not in EXPERIMENTS:
        print(f"error: unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}",
              file=sys.stderr)
        return 1
    seed, out = cfg.seed, cfg.output

    def listed(key, conv):
        v = params[key]
        return [conv(x) for x in v] if isinstance(v, list) else (
            _int_list(v) if conv is int else _float_list(v))

    if name == "prop1":
        trials = int(params["trials"])
        accs = theory.prop1_trials(trials, seed)
        _write(out / "prop1.csv", _csv_text(["trial", "accuracy"], enumerate(accs)))
        if all(a == 1.0 for a in accs):
            print(f"all {trials} trials: estimated accuracy = 1.0")
            return 0
        bad = sum(a != 1.0 for a in accs)
        print(f"{bad} of {trials} trials: estimated accuracy < 1.0")
        return 1

    if name == "thm1":
        rows = theory.thm1_sweep(
            separations=listed("separations", float), dims=listed("dims", int),
            num_classes=int(params["classes"]),
            samples_per_class=int(params["samples_per_class"]),
            trials=int(params["trials"]), delta=float(params["delta"]),
            constants=(float(params["c1"]), float(params["c_tilde"])), seed=seed)
        _write(out / "thm1.csv", _csv_text(
            ["separation", "d", "trial", "empirical_err", "margin_term", "bound", "holds"],
            rows))
        held = sum(r[-1] for r in rows)
        print(f"bound held in {held}/{len(rows)} trials")
        return 0 if held == len(rows) else 1

    if name == "cor1":
        n = int(params["samples_per_class"])
        base = theory.MixtureSpec(int(params["classes"]), 1,
                                  np.zeros((int(params["classes"]), 1)), 1.0, n, seed)
        trials = int(params["trials"])
        res = theory.dim_decay_experiment(base, listed("dims", int),
                                          float(params["per_coord_sep"]), trials)
        n_pts = n * base.num_classes * trials
        rows = [(d, err, theory.mc_stderr(err, n_pts)) for d, err in res]
        text = _csv_text(["d", "err", "stderr"], rows)
        _write(out / "cor1.csv", text)
        sys.stdout.write(text)
        return 0

    if name == "ksweep":
        K, d, sep = int(params["classes"]), int(params["dim"]), float(params["separation"])
        spec = theory.MixtureSpec(K, d, theory.simplex_means(K, d, sep * math.sqrt(d)),
                                  1.0, int(params["samples_per_class"]), seed)
        cloud = theory.sample_mixture(spec)
        rows = theory.k_sweep_experiment(cloud, listed("k_values", int),
                                         float(params["delta"]),
                                         (float(params["c1"]), float(params["c_tilde"])),
                                         seed)
        text = _csv_text(["k", "margin_term"], rows)
        _write(out / "ksweep.csv", text)
        sys.stdout.write(text)
        return 0

    spec = TrajectorySpec(num_checkpoints=int(params["checkpoints"]),
                          num_images=int(params["images"]),
                          num_patches=int(params["patches"]), dim=int(params["dim"]),
                          schedule=params["schedule"], seed=seed)
    traj = generate_trajectory(spec)
    out.mkdir(parents=True, exist_ok=True)
    for batch, _ in traj:
        save_embeddings(out / f"{batch.source_id}.npy", batch.data)
    _write(out / "truth.csv", _csv_text(["source_id", "value"],
                                        [(b.source_id, repr(a)) for b, a in traj]))
    _write(out / "trajectory.json", json.dumps(spec.to_dict(), indent=2) + "\n")
    print(f"wrote {len(traj)} checkpoints ({spec.schedule}) to {out}")
    return 0


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML file; flags override its values")
    p.add_argument("--output", help="output directory (default: dse_out)")
    p.add_argument("--seed", type=int, help="seed for all randomness (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="score every <source_id>.npy in a directory")
    _common(p)
    p.add_argument("--input-dir")
    p.add_argument("--b-prime", type=int, help="rows sampled for the effective rank")
    p.add_argument("--sep-configs", help='(B, k) pairs, e.g. "1:3,8:24"')
    p.add_argument("--lambda", type=float, dest="lambda", help="fix lambda instead of estimating it")
    p.add_argument("--jobs", type=int, help="worker threads (default: all cores)")

    p = sub.add_parser("select", help="local-maximum / top-T checkpoint selection")
    _common(p)
    p.add_argument("--series", help="series.json (default: <output>/series.json)")
    p.add_argument("--window", type=int)
    p.add_argument("--top-t", type=int)

    p = sub.add_parser("tau", help="Kendall tau against a performance CSV")
    _common(p)
    p.add_argument("--series", help="series.json (default: <output>/series.json)")
    p.add_argument("--perf", required=True, help="CSV with header source_id,value")
    p.add_argument("--metric", choices=("dse", "cls_sep", "m_dim"), default="dse")

    p = sub.add_parser("synth", help="synthetic experiments and trajectories")
    _common(p)
    p.add_argument("experiment", nargs="?", help=" | ".join(EXPERIMENTS))
    p.add_argument("--spec", help="JSON file overriding the experiment parameters")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dims", default="1,4,16,64")
    p.add_argument("--separations", default="1,2,4,8")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--samples-per-class", type=int, default=1000)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c-tilde", type=float, default=1.0)
    p.add_argument("--per-coord-sep", type=float, default=6.0)
    p.add_argument("--k-values", default="1,2,4,8")
    p.add_argument("--separation", type=float, default=8.0,
                   help="ksweep: class-mean separation in units of R*sqrt(d)")
    p.add_argument("--schedule", choices=SCHEDULES, default="improving")
    p.add_argument("--checkpoints", type=int, default=10)
    p.add_argument("--images", type=int, default=64)
    p.add_argument("--patches", type=int, default=49)
    p.add_argument("--dim", type=int, default=32, help="trajectory / ksweep dimension")
    return parser


def _setup_logging():
    level = LOG_LEVELS.get(os.environ.get("DSE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "compute":
            return cmd_compute(cfg)
        if args.command == "select":
            return cmd_select(cfg, args.series or cfg.output / "series.json")
        if args.command == "tau":
            return cmd_tau(cfg, args.series or cfg.output / "series.json", args.perf,
                           args.metric)
        if args.experiment is None and not args.spec:
            parser.error("synth needs an experiment name")
        return cmd_synth(args, cfg)
    except DSEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
