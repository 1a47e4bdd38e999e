"""Command-line driver: experiment configuration, the evaluation sweep over
methods x tasks x variants, and emission of result tables and plot data.

Output files are plain CSV/JSON with fixed column orders and 6-decimal
fixed-point numbers, so reruns with the same config and seed are diffable.
Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .dataset import (DEFAULT_GROUP_PREFIXES, Dataset, Task, Variant,
                      apply_standardizer, encode_binary, fit_standardizer,
                      load_csv, select_variant)
from .evaluation import BestResult, ResultRecord, best_over_k, run_pipeline
from .rankers import Method, RankerSettings, fit_ranker

RECORD_COLUMNS = ["method", "task", "variant", "k", "repeat_id", "fold_id",
                  "balanced_accuracy", "selected_features", "runtime_ms"]
SUMMARY_COLUMNS = ["method", "task", "variant", "best_balanced_accuracy",
                   "best_k", "stability"]


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    data_path: str = "bldc_features.csv"
    label_column: str = "class"
    healthy_class: str = "Healthy"
    current_prefixes: tuple[str, ...] = ("CURRENT",)
    speed_prefixes: tuple[str, ...] = ("ROTO",)
    tasks: tuple[Task, ...] = (Task.BINARY, Task.MULTICLASS)
    variants: tuple[Variant, ...] = (Variant.CURRENT, Variant.SPEED,
                                     Variant.COMBINED)
    methods: tuple[Method, ...] = (Method.RELIEFF, Method.MRMR, Method.LASSO,
                                   Method.SPIKE_SLAB, Method.ARD)
    folds: int = 5
    repeats: int = 10
    seed: int = 0
    k_grid_current: tuple[int, ...] = (3, 5, 7, 10, 13)
    k_grid_speed: tuple[int, ...] = (3, 5, 7, 10, 13)
    k_grid_combined: tuple[int, ...] = (3, 5, 7, 10, 13, 16, 20, 26)
    ridge: float = 1.0
    relieff_neighbors: int = 10
    mi_bins: int = 8
    lasso_grid_size: int = 20
    lasso_inner_folds: int = 3
    lasso_lambda_min_ratio: float = 1e-3
    ss_tau0_sq: float = 1e-3
    ss_tau1_sq: float = 1.0
    ss_pi: float = 0.5
    ard_epsilon: float = 0.1
    ard_alpha_init: float = 1.0
    ard_alpha_min: float = 1e-4
    ard_alpha_max: float = 1e6
    solver_tol: float = 1e-6
    solver_max_iter: int = 500
    output_dir: str = "results"

    def validate(self) -> None:
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if not self.tasks:
            raise ConfigError("at least one task required")
        if not self.variants:
            raise ConfigError("at least one variant required")
        if not self.methods:
            raise ConfigError("at least one method required")
        if not (0.0 < self.ss_pi < 1.0):
            raise ConfigError("spike_slab pi must lie in (0, 1)")
        if not (0.0 < self.ss_tau0_sq < self.ss_tau1_sq):
            raise ConfigError("need 0 < tau0_sq < tau1_sq")

    def group_prefixes(self):
        return {Variant.CURRENT: self.current_prefixes,
                Variant.SPEED: self.speed_prefixes}

    def k_grid_for(self, variant: Variant) -> tuple[int, ...]:
        return {Variant.CURRENT: self.k_grid_current,
                Variant.SPEED: self.k_grid_speed,
                Variant.COMBINED: self.k_grid_combined}[variant]

    def ranker_settings(self) -> RankerSettings:
        return RankerSettings(
            relieff_neighbors=self.relieff_neighbors,
            mi_bins=self.mi_bins,
            lasso_grid_size=self.lasso_grid_size,
            lasso_inner_folds=self.lasso_inner_folds,
            lasso_lambda_min_ratio=self.lasso_lambda_min_ratio,
            ss_tau0_sq=self.ss_tau0_sq,
            ss_tau1_sq=self.ss_tau1_sq,
            ss_pi=self.ss_pi,
            ard_epsilon=self.ard_epsilon,
            ard_alpha_init=self.ard_alpha_init,
            ard_alpha_bounds=(self.ard_alpha_min, self.ard_alpha_max),
            tol=self.solver_tol,
            max_iter=self.solver_max_iter,
        )

    def to_dict(self) -> dict:
        return {
            "data": {
                "path": self.data_path,
                "label_column": self.label_column,
                "healthy_class": self.healthy_class,
                "current_prefixes": list(self.current_prefixes),
                "speed_prefixes": list(self.speed_prefixes),
            },
            "protocol": {
                "tasks": [t.value for t in self.tasks],
                "variants": [v.value for v in self.variants],
                "methods": [m.value for m in self.methods],
                "folds": self.folds,
                "repeats": self.repeats,
                "seed": self.seed,
                "k_grid_current": list(self.k_grid_current),
                "k_grid_speed": list(self.k_grid_speed),
                "k_grid_combined": list(self.k_grid_combined),
                "ridge": self.ridge,
            },
            "relieff": {"neighbors": self.relieff_neighbors},
            "mi": {"bins": self.mi_bins},
            "lasso": {
                "grid_size": self.lasso_grid_size,
                "inner_folds": self.lasso_inner_folds,
                "lambda_min_ratio": self.lasso_lambda_min_ratio,
            },
            "spike_slab": {"tau0_sq": self.ss_tau0_sq,
                           "tau1_sq": self.ss_tau1_sq, "pi": self.ss_pi},
            "ard": {"epsilon": self.ard_epsilon,
                    "alpha_init": self.ard_alpha_init,
                    "alpha_min": self.ard_alpha_min,
                    "alpha_max": self.ard_alpha_max},
            "solver": {"tol": self.solver_tol,
                       "max_iter": self.solver_max_iter},
            "output": {"dir": self.output_dir},
        }

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section, entries in self.to_dict().items():
            parser[section] = {
                key: (",".join(str(v) for v in val)
                      if isinstance(val, list) else str(val))
                for key, val in entries.items()
            }
        import io
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()


def _parse_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _parse_enum_list(raw: str, enum_cls, what: str):
    valid = [e.value for e in enum_cls]
    out = []
    for item in _parse_list(raw):
        if item not in valid:
            raise ConfigError(
                f"unknown {what} {item!r}; valid {what}s: {', '.join(valid)}")
        out.append(enum_cls(item))
    return tuple(out)


def load_config(path) -> ExperimentConfig:
    """Parse the INI experiment file; unknown keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    cfg = ExperimentConfig()
    known = cfg.to_dict()
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in known[section]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}]")
    get = parser.get

    def has(section, key):
        return parser.has_option(section, key)

    try:
        if has("data", "path"):
            cfg.data_path = get("data", "path")
        if has("data", "label_column"):
            cfg.label_column = get("data", "label_column")
        if has("data", "healthy_class"):
            cfg.healthy_class = get("data", "healthy_class")
        if has("data", "current_prefixes"):
            cfg.current_prefixes = tuple(_parse_list(get("data", "current_prefixes")))
        if has("data", "speed_prefixes"):
            cfg.speed_prefixes = tuple(_parse_list(get("data", "speed_prefixes")))
        if has("protocol", "tasks"):
            cfg.tasks = _parse_enum_list(get("protocol", "tasks"), Task, "task")
        if has("protocol", "variants"):
            cfg.variants = _parse_enum_list(get("protocol", "variants"),
                                            Variant, "variant")
        if has("protocol", "methods"):
            cfg.methods = _parse_enum_list(get("protocol", "methods"),
                                           Method, "method")
        for attr, section, key, conv in [
            ("folds", "protocol", "folds", int),
            ("repeats", "protocol", "repeats", int),
            ("seed", "protocol", "seed", int),
            ("ridge", "protocol", "ridge", float),
            ("relieff_neighbors", "relieff", "neighbors", int),
            ("mi_bins", "mi", "bins", int),
            ("lasso_grid_size", "lasso", "grid_size", int),
            ("lasso_inner_folds", "lasso", "inner_folds", int),
            ("lasso_lambda_min_ratio", "lasso", "lambda_min_ratio", float),
            ("ss_tau0_sq", "spike_slab", "tau0_sq", float),
            ("ss_tau1_sq", "spike_slab", "tau1_sq", float),
            ("ss_pi", "spike_slab", "pi", float),
            ("ard_epsilon", "ard", "epsilon", float),
            ("ard_alpha_init", "ard", "alpha_init", float),
            ("ard_alpha_min", "ard", "alpha_min", float),
            ("ard_alpha_max", "ard", "alpha_max", float),
            ("solver_tol", "solver", "tol", float),
            ("solver_max_iter", "solver", "max_iter", int),
            ("output_dir", "output", "dir", str),
        ]:
            if has(section, key):
                setattr(cfg, attr, conv(get(section, key)))
        for attr, key in [("k_grid_current", "k_grid_current"),
                          ("k_grid_speed", "k_grid_speed"),
                          ("k_grid_combined", "k_grid_combined")]:
            if has("protocol", key):
                setattr(cfg, attr,
                        tuple(int(v) for v in _parse_list(get("protocol", key))))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    cfg.validate()
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _prepare_dataset(cfg: ExperimentConfig, task: Task,
                     variant: Variant) -> Dataset:
    d = load_csv(cfg.data_path, label_column=cfg.label_column)
    if task is Task.BINARY:
        d = encode_binary(d, cfg.healthy_class)
    d = select_variant(d, variant, cfg.group_prefixes())
    return d


def cmd_rank(cfg: ExperimentConfig, task: Task, variant: Variant,
             method: Method, out_dir) -> Path:
    """Rank on the full standardized dataset and write the ordered CSV."""
    d = _prepare_dataset(cfg, task, variant)
    scaler = fit_standardizer(d.X)
    X = apply_standardizer(scaler, d.X)
    ranking = fit_ranker(method, X, d.y, cfg.ranker_settings(), seed=cfg.seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"ranking_{task.value}_{variant.value}_{method.value}.csv"
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        for key in sorted(ranking.meta):
            fh.write(f"# {key}={ranking.meta[key]}\n")
        writer = csv.writer(fh)
        writer.writerow(["rank", "feature_name", "score"])
        for pos, j in enumerate(ranking.order, start=1):
            writer.writerow([pos, d.feature_names[j],
                             _fmt(float(ranking.scores[j]))])
    return out_path


def cmd_evaluate(cfg: ExperimentConfig, out_dir) -> Path:
    """Run every configured cell and write records, summary and manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    settings = cfg.ranker_settings()
    all_records: list[tuple[str, ResultRecord]] = []
    bests: list[BestResult] = []
    feature_names: dict[str, list[str]] = {}
    timings: dict[str, float] = {}
    cell_features: dict[tuple, list[str]] = {}
    for task in cfg.tasks:
        for variant in cfg.variants:
            d = _prepare_dataset(cfg, task, variant)
            feature_names[variant.value] = list(d.feature_names)
            grid = cfg.k_grid_for(variant)
            for method in cfg.methods:
                t0 = time.perf_counter()
                records = run_pipeline(d, method, grid, cfg.folds,
                                       cfg.repeats, cfg.seed,
                                       settings=settings, ridge=cfg.ridge)
                bests.append(best_over_k(records, grid))
                cell = f"{method.value}/{task.value}/{variant.value}"
                timings[cell] = time.perf_counter() - t0
                names = d.feature_names
                cell_features[(method, task, variant)] = list(names)
                for r in records:
                    all_records.append((cell, r))

    records_path = out_dir / "records.csv"
    with records_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for cell, r in all_records:
            names = cell_features[(r.method, r.task, Variant(r.variant))]
            writer.writerow([
                r.method.value, r.task.value, r.variant, r.k, r.repeat_id,
                r.fold_id, _fmt(r.balanced_accuracy),
                "|".join(names[j] for j in r.selected_features),
                _fmt(r.runtime_ms),
            ])

    summary_path = out_dir / "summary.csv"
    with summary_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for b in bests:
            writer.writerow([b.method.value, b.task.value, b.variant,
                             _fmt(b.best_balanced_accuracy), b.best_k,
                             _fmt(b.stability)])

    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "feature_names": feature_names,
        "cells": [
            {"method": b.method.value, "task": b.task.value,
             "variant": b.variant,
             "best_balanced_accuracy": round(b.best_balanced_accuracy, 6),
             "best_k": b.best_k, "stability": round(b.stability, 6)}
            for b in bests
        ],
        "records": [
            {"method": r.method.value, "task": r.task.value,
             "variant": r.variant, "k": r.k, "repeat_id": r.repeat_id,
             "fold_id": r.fold_id,
             "balanced_accuracy": round(r.balanced_accuracy, 6),
             "selected_features": list(r.selected_features),
             "runtime_ms": round(r.runtime_ms, 6)}
            for _, r in all_records
        ],
        "wall_clock_seconds": {k: round(v, 3) for k, v in timings.items()},
    }
    with (out_dir / "manifest.json").open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary_path


def _read_csv(path: Path) -> list[dict]:
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_report(results_dir, out_dir=None) -> Path:
    """Render the summary tables and emit the figure data files."""
    results_dir = Path(results_dir)
    out_dir = Path(out_dir) if out_dir is not None else results_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = results_dir / "summary.csv"
    records_path = results_dir / "records.csv"
    manifest_path = results_dir / "manifest.json"
    missing = [p.name for p in (summary_path, records_path, manifest_path)
               if not p.exists()]
    if missing:
        raise FileNotFoundError(
            f"missing results files in {results_dir}: {', '.join(missing)}")
    summary = _read_csv(summary_path)
    records = _read_csv(records_path)
    with manifest_path.open(encoding="utf-8") as fh:
        manifest = json.load(fh)
    feature_names = manifest["feature_names"]

    fig1_path = out_dir / "fig1_data.csv"
    with fig1_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task", "variant", "method",
                         "best_balanced_accuracy", "best_k", "stability"])
        for row in summary:
            writer.writerow([row["task"], row["variant"], row["method"],
                             row["best_balanced_accuracy"], row["best_k"],
                             row["stability"]])

    # selection frequency per feature at each cell's best k
    best_k = {(r["method"], r["task"], r["variant"]): int(r["best_k"])
              for r in summary}
    counts: dict[tuple, dict[str, int]] = {}
    totals: dict[tuple, int] = {}
    for rec in records:
        key = (rec["method"], rec["task"], rec["variant"])
        if key not in best_k or int(rec["k"]) != best_k[key]:
            continue
        totals[key] = totals.get(key, 0) + 1
        bucket = counts.setdefault(key, {})
        for name in rec["selected_features"].split("|"):
            bucket[name] = bucket.get(name, 0) + 1
    fig2_path = out_dir / "fig2_data.csv"
    with fig2_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task", "variant", "method", "feature_name",
                         "selection_frequency"])
        for row in summary:
            key = (row["method"], row["task"], row["variant"])
            names = feature_names[row["variant"]]
            bucket = counts.get(key, {})
            total = totals.get(key, 0)
            for name in names:
                freq = bucket.get(name, 0) / total if total else 0.0
                writer.writerow([row["task"], row["variant"], row["method"],
                                 name, _fmt(freq)])

    report_path = out_dir / "summary.md"
    with report_path.open("w", encoding="utf-8") as fh:
        fh.write("# Benchmark summary\n")
        tasks = sorted({row["task"] for row in summary})
        methods = list(dict.fromkeys(row["method"] for row in summary))
        for task in tasks:
            fh.write(f"\n## {task}\n\n")
            fh.write("| variant | " + " | ".join(methods) + " |\n")
            fh.write("|---" * (len(methods) + 1) + "|\n")
            variants = list(dict.fromkeys(
                row["variant"] for row in summary if row["task"] == task))
            for variant in variants:
                cells = []
                for method in methods:
                    match = [row for row in summary
                             if (row["task"], row["variant"], row["method"])
                             == (task, variant, method)]
                    if match:
                        row = match[0]
                        cells.append(
                            f"{float(row['best_balanced_accuracy']):.3f} / "
                            f"k={row['best_k']} / "
                            f"J={float(row['stability']):.3f}")
                    else:
                        cells.append("-")
                fh.write(f"| {variant} | " + " | ".join(cells) + " |\n")
    return report_path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featrank",
        description="Feature-ranking benchmark for diagnostic CSV datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_print = sub.add_parser("print-config",
                             help="print the effective configuration")
    p_print.add_argument("--config", help="config file to load first")

    p_rank = sub.add_parser("rank", help="write one full feature ranking")
    p_rank.add_argument("--config", required=True)
    p_rank.add_argument("--task", required=True,
                        choices=[t.value for t in Task])
    p_rank.add_argument("--variant", required=True,
                        choices=[v.value for v in Variant])
    p_rank.add_argument("--method", required=True,
                        choices=[m.value for m in Method])
    p_rank.add_argument("--seed", type=int)
    p_rank.add_argument("--out", help="output directory")

    p_eval = sub.add_parser("evaluate", help="run the full benchmark sweep")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--seed", type=int)
    p_eval.add_argument("--out", help="output directory")

    p_rep = sub.add_parser("report", help="render tables and figure data")
    p_rep.add_argument("--results", required=True,
                       help="directory produced by evaluate")
    p_rep.add_argument("--out", help="output directory (default: results)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "print-config":
            cfg = load_config(args.config) if args.config else ExperimentConfig()
            sys.stdout.write(cfg.to_ini())
            return 0
        if args.command == "rank":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
            out = args.out or cfg.output_dir
            path = cmd_rank(cfg, Task(args.task), Variant(args.variant),
                            Method(args.method), out)
            print(f"wrote {path}")
            return 0
        if args.command == "evaluate":
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
            out = args.out or cfg.output_dir
            path = cmd_evaluate(cfg, out)
            print(f"wrote {path.parent}")
            return 0
        if args.command == "report":
            path = cmd_report(args.results, args.out)
            print(f"wrote {path.parent}")
            return 0
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
