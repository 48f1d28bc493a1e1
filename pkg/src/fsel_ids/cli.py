"""Command-line front end: select, train, evaluate, bench.

Each command reads an optional JSON config file plus flag overrides (flags
win), runs the corresponding pipeline stages, writes JSON/Markdown/JSONL
artifacts, and exits nonzero exactly when a stage failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .dataset import stratified_subsample
from .metrics import build_report, confusion, markdown_table, report_to_json
from .models import model_from_json, model_to_json, predict_model
from .pipeline import (
    FS_METHODS,
    PipelineError,
    PipelineResult,
    RunConfig,
    load_splits,
    run_pipeline,
    select_features,
)
from .preprocess import apply_preprocess, plan_from_json, plan_to_json
from .wrapper import subset_names, trace_to_jsonl

SELECTION_FORMAT = "fsel-ids/selection"
BENCH_ONLY_KEYS = ("fs_methods", "algorithms")


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsel-ids",
        description="Feature selection and intrusion detection modeling toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--train", help="training CSV path")
        p.add_argument("--test", help="test CSV path")
        p.add_argument("--schema", help="schema file (name,kind lines); default UNSW-NB15")
        p.add_argument("--fs", choices=FS_METHODS, help="feature selection method")
        p.add_argument("--k", type=int, help="features to keep for ranker methods")
        p.add_argument("--algo", help="classifier tag")
        p.add_argument("--seed", type=int, help="master seed for the whole run")
        p.add_argument("--subsample", type=float, help="training subsample fraction")
        p.add_argument("--bins", type=int, help="bins for entropy-filter discretization")
        p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                       type=_parse_override, dest="overrides",
                       help="hyperparameter override, repeatable")
        p.add_argument("--out", default=".", help="output directory")

    p_select = sub.add_parser("select", help="run feature selection and save the subset")
    add_common(p_select)

    p_train = sub.add_parser("train", help="select, preprocess and train a model")
    add_common(p_train)

    p_eval = sub.add_parser("evaluate", help="evaluate a config or a saved model")
    add_common(p_eval)
    p_eval.add_argument("--model", help="saved model JSON (with --plan, skips training)")
    p_eval.add_argument("--plan", help="saved preprocess plan JSON")

    p_bench = sub.add_parser("bench", help="run an FS-method x algorithm grid")
    add_common(p_bench)
    p_bench.add_argument("--jobs", type=int, default=1, help="concurrent grid cells")

    return parser


def _load_config(args, allow_grid: bool = False) -> tuple[RunConfig, dict]:
    """Merge config-file fields with flag overrides (flags win)."""
    doc: dict = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
    grid = {key: doc.pop(key) for key in BENCH_ONLY_KEYS if key in doc}
    if grid and not allow_grid:
        raise ValueError(f"grid fields {sorted(grid)} are only valid for bench")
    flag_map = {
        "train": "train_path",
        "test": "test_path",
        "schema": "schema_path",
        "fs": "fs",
        "k": "k",
        "algo": "algorithm",
        "seed": "seed",
        "subsample": "subsample",
        "bins": "bins",
    }
    for flag, field in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            doc[field] = value
    overrides = dict(doc.get("params") or {})
    for key, value in args.overrides:
        overrides[key] = value
    doc["params"] = overrides
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"unknown config fields: {unknown}")
    if "train_path" not in doc or "test_path" not in doc:
        raise ValueError("a run needs --train and --test (or config fields)")
    if "stop_after" in doc and doc["stop_after"] == 0:
        doc["stop_after"] = None
    return RunConfig(**doc), grid


def _selection_doc(config: RunConfig, names, scores) -> str:
    doc = {
        "format": SELECTION_FORMAT,
        "version": 1,
        "fs_method": config.fs,
        "selected": list(names),
    }
    if scores is not None:
        doc["scores"] = [
            {"feature": scores.feature_names[i], "score": float(scores.scores[i])}
            for i in scores.ranked
        ]
    return json.dumps(doc, indent=2)


def cmd_select(args) -> int:
    config, _ = _load_config(args)
    if config.fs == "none":
        raise ValueError("select needs an fs method other than 'none'")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train, _, _ = load_splits(config)
    if config.subsample < 1.0:
        train = stratified_subsample(train, config.subsample, config.seed)
    subset, fs_seconds, scores, trace = select_features(train, config)
    names = subset_names(train, subset)
    (out / "selected.json").write_text(_selection_doc(config, names, scores),
                                       encoding="utf-8")
    if trace is not None:
        (out / "trace.jsonl").write_text(
            trace_to_jsonl(trace, train.feature_names), encoding="utf-8"
        )
    print(f"{config.fs}: selected {len(names)} features in {fs_seconds:.2f}s "
          f"-> {out / 'selected.json'}")
    for name in names:
        print(f"  {name}")
    return 0


def _write_run_artifacts(result: PipelineResult, config: RunConfig, out: Path):
    (out / "model.json").write_text(model_to_json(result.model), encoding="utf-8")
    (out / "plan.json").write_text(plan_to_json(result.plan), encoding="utf-8")
    (out / "selected.json").write_text(
        _selection_doc(config, result.selected_names, result.scores), encoding="utf-8"
    )
    if result.trace is not None:
        (out / "trace.jsonl").write_text(
            trace_to_jsonl(result.trace, result.selected_names), encoding="utf-8"
        )


def cmd_train(args) -> int:
    config, _ = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_pipeline(config)
    _write_run_artifacts(result, config, out)
    print(f"trained {config.algorithm} on {result.report.selected_count} features "
          f"(train {result.report.train_seconds:.2f}s) -> {out / 'model.json'}")
    return 0


def _write_report(report, out: Path) -> None:
    (out / "report.json").write_text(report_to_json(report), encoding="utf-8")
    (out / "report.md").write_text(markdown_table([report]), encoding="utf-8")


def cmd_evaluate(args) -> int:
    config, _ = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if (args.model is None) != (args.plan is None):
        raise ValueError("--model and --plan must be given together")
    if args.model:
        model = model_from_json(Path(args.model).read_text(encoding="utf-8"))
        plan = plan_from_json(Path(args.plan).read_text(encoding="utf-8"))
        _, test, _ = load_splits(config)
        started = time.perf_counter()
        encoded = apply_preprocess(plan, test)
        predictions = predict_model(model, encoded)
        eval_seconds = time.perf_counter() - started
        report = build_report(
            dataset=config.name,
            fs_method="saved",
            selected_count=len(plan.selected),
            algorithm=model.algorithm,
            cm=confusion(predictions, test.labels),
            fs_seconds=0.0,
            train_seconds=model.train_seconds,
            eval_seconds=eval_seconds,
        )
    else:
        report = run_pipeline(config).report
    _write_report(report, out)
    print(markdown_table([report]), end="")
    print(f"ACC {report.acc:.2f}  DR {report.dr:.2f}  FAR {report.far:.2f} "
          f"-> {out / 'report.json'}")
    return 0


def _bench_cell(config: RunConfig):
    try:
        return run_pipeline(config).report, None
    except Exception as exc:  # noqa: BLE001 -- cell failures must not kill the batch
        return None, f"{type(exc).__name__}: {exc}"


def cmd_bench(args) -> int:
    base, grid = _load_config(args, allow_grid=True)
    fs_methods = grid.get("fs_methods") or [base.fs]
    algorithms = grid.get("algorithms") or [base.algorithm]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cells = []
    for fs in fs_methods:
        for algo in algorithms:
            cells.append(dataclasses.replace(base, fs=fs, algorithm=algo))

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_bench_cell, cells))
    else:
        outcomes = [_bench_cell(c) for c in cells]

    reports, failures = [], []
    for config, (report, error) in zip(cells, outcomes):
        cell_dir = out / f"cell_{config.fs}_{config.algorithm}"
        cell_dir.mkdir(parents=True, exist_ok=True)
        if report is not None:
            _write_report(report, cell_dir)
            reports.append(report)
        else:
            (cell_dir / "error.txt").write_text(error + "\n", encoding="utf-8")
            failures.append({"fs": config.fs, "algorithm": config.algorithm,
                             "error": error})

    averages = []
    for fs in fs_methods:
        rows = [r for r in reports if r.fs_method == fs]
        if not rows:
            continue
        averages.append({
            "fs_method": fs,
            "cells": len(rows),
            "mean_acc": sum(r.acc for r in rows) / len(rows),
            "mean_dr": sum(r.dr for r in rows) / len(rows),
            "mean_far": sum(r.far for r in rows) / len(rows),
            "mean_fs_seconds": sum(r.fs_seconds for r in rows) / len(rows),
            "mean_blended_train_seconds":
                sum(r.blended_train_seconds for r in rows) / len(rows),
        })

    summary = {"reports": len(reports), "failures": failures, "averages": averages}
    (out / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    md_lines = [markdown_table(reports).rstrip("\n"), "",
                "| FS Method | Mean ACC | Mean DR | Mean FAR | Mean FS s | Mean Train+FS s |",
                "|---|---|---|---|---|---|"]
    for row in averages:
        md_lines.append(
            f"| {row['fs_method']} | {row['mean_acc']:.2f} | {row['mean_dr']:.2f} "
            f"| {row['mean_far']:.2f} | {row['mean_fs_seconds']:.2f} "
            f"| {row['mean_blended_train_seconds']:.2f} |"
        )
    (out / "summary.md").write_text("\n".join(md_lines) + "\n", encoding="utf-8")

    print(f"bench: {len(reports)} cells ok, {len(failures)} failed -> {out / 'summary.md'}")
    for failure in failures:
        print(f"  failed {failure['fs']}/{failure['algorithm']}: {failure['error']}",
              file=sys.stderr)
    return 1 if failures else 0


COMMANDS = {
    "select": cmd_select,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
