"""Command-line entry point for reproducible end-to-end runs.

Subcommands: train, prune, extract, evaluate, predict, topk (debug).
Exit codes: 0 ok, 1 usage, 2 data/config problem, 3 schema mismatch,
4 training failure.

A run is described by a JSON config (dataset path, column specs, task and
every training knob); command-line flags override config values. Every
command that writes artifacts also writes a manifest capturing the resolved
config, seed and library versions, which is enough to reproduce the run
byte-for-byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import platform
import sys

import numpy as np
import pandas as pd

from . import __version__, logic, metrics, softtopk
from . import model as model_mod
from .encode import ColumnSpec, fit_schema, transform
from .errors import (
    InvalidConfigError,
    InvalidInputError,
    SchemaMismatchError,
    TrainingFailureError,
    UndefinedMetricError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SCHEMA = 3
EXIT_TRAINING = 4

TRAIN_FIELDS = {f.name for f in dataclasses.fields(model_mod.TrainConfig)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def load_config(path: str, overrides: dict) -> dict:
    p = pathlib.Path(path)
    if not p.exists():
        raise InvalidConfigError(f"config not found: {path}")
    try:
        config = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InvalidConfigError(f"config is not valid JSON: {e}") from e
    for key, value in overrides.items():
        if value is not None:
            config[key] = value
    for key in ("dataset", "task", "columns"):
        if key not in config:
            raise InvalidConfigError(f"config missing required key '{key}'")
    return config


def train_config_from(config: dict) -> model_mod.TrainConfig:
    kwargs = {k: v for k, v in config.items() if k in TRAIN_FIELDS}
    tc = model_mod.TrainConfig(**kwargs)
    tc.validate()
    return tc


def read_dataset(config: dict) -> pd.DataFrame:
    path = pathlib.Path(config["dataset"])
    if not path.exists():
        raise InvalidInputError(f"dataset not found: {path}")
    return pd.read_csv(path)


def column_specs(config: dict) -> list[ColumnSpec]:
    return [ColumnSpec(c["name"], c["kind"], c.get("role", "feature"))
            for c in config["columns"]]


def run_training(config: dict):
    """Full protocol: hold-out split, schema fit on the development rows,
    gradient training, then iterative pruning. Returns (model, logs, frames)."""
    tc = train_config_from(config)
    df = read_dataset(config)
    specs = column_specs(config)
    task = config["task"]

    test_fraction = float(config.get("test_fraction", 0.2))
    dev_idx, test_idx = model_mod.holdout_split(len(df), tc.seed, test_fraction)
    dev, test = df.iloc[dev_idx], df.iloc[test_idx]

    schema = fit_schema(dev, specs, bits=tc.bits, task=task)
    ds_dev = transform(schema, dev)

    rng = np.random.default_rng(tc.seed)
    model = model_mod.new_model(schema, task, tc, rng)
    train_log = model_mod.train(model, ds_dev, tc, rng)
    prune_log = model_mod.prune_finetune(model, ds_dev, tc, rng)
    model.train_summary["split"] = {"seed": tc.seed, "test_fraction": test_fraction}

    logs = {"train": train_log, "prune": prune_log}
    return model, logs, {"dev": dev, "test": test, "full": df}


def _score_on(model, frame: pd.DataFrame) -> float:
    data = transform(model.schema, frame)
    return model_mod.score(model, data.X, data.y)


def _jsonable(obj):
    """Strict-JSON copy: non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def cmd_train(args) -> int:
    config = load_config(args.config, _overrides(args))
    out = pathlib.Path(config.get("output_dir", "runs/latest"))
    model, logs, frames = run_training(config)

    if len(frames["test"]) > 0:
        try:
            logs["test_metric"] = _score_on(model, frames["test"])
        except UndefinedMetricError:
            logs["test_metric"] = None

    out.mkdir(parents=True, exist_ok=True)
    model_mod.save_model(model, out / "model.json")
    (out / "training_log.json").write_text(
        json.dumps(_jsonable(logs), indent=1, sort_keys=True, allow_nan=False))
    (out / "manifest.json").write_text(json.dumps({
        "command": "train",
        "config": config,
        "versions": {"ttrules": __version__, "numpy": np.__version__,
                     "pandas": pd.__version__, "python": platform.python_version()},
    }, indent=1, sort_keys=True))

    sel = logs["prune"]["selected_round"]
    rounds = logs["prune"]["rounds"]
    print(f"model written to {out / 'model.json'}")
    print(f"selected prune round {sel}: val_metric={rounds[sel]['val_metric']:.4f} "
          f"complexity={rounds[sel]['complexity']}")
    if logs.get("test_metric") is not None:
        print(f"test metric: {logs['test_metric']:.4f}")
    return EXIT_OK


def cmd_prune(args) -> int:
    config = load_config(args.config, _overrides(args))
    tc = train_config_from(config)
    model = model_mod.load_model(args.model)
    df = read_dataset(config)
    data = transform(model.schema, df)
    log = model_mod.prune_finetune(model, data, tc)
    out = pathlib.Path(args.out or args.model)
    model_mod.save_model(model, out)
    print(f"pruned model written to {out} (selected round {log['selected_round']})")
    return EXIT_OK


def cmd_extract(args) -> int:
    model = model_mod.load_model(args.model)
    if model.layer.frozen_masks is None:
        print("warning: model masks were never frozen; extracting on the current "
              "selection", file=sys.stderr)
        from .layer import freeze_masks
        freeze_masks(model.layer)
    path = pathlib.Path(args.data)
    if not path.exists():
        raise InvalidInputError(f"dataset not found: {path}")
    df = pd.read_csv(path)
    data = transform(model.schema, df)

    ruleset = logic.extract_rules(model, data, form=args.format,
                                  use_xor=not args.no_xor)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    net_pred, _ = model_mod.model_forward(model, data.X)
    rule_pred = logic.rule_eval_bits(ruleset, data.X)
    exact = _decision_agreement(model.task, net_pred, rule_pred)

    text = logic.render(ruleset)
    formula = logic.decision_formula(model, data, use_xor=not args.no_xor)
    if formula is not None:
        text += ("\nmodel decision (exact on observed patterns): "
                 + logic.formula_text(model.schema, list(range(model.n_bits)), formula)
                 + "\n")
    text += f"\nexact-match: {exact:.4f}\n"
    (out / "rules.txt").write_text(text)
    (out / "rules.json").write_text(logic.serialize_rules(ruleset))
    print(text)
    print(f"rules written to {out / 'rules.txt'} and rules.json")
    return EXIT_OK


def _decision_agreement(task: str, a: np.ndarray, b: np.ndarray) -> float:
    if task == "binary":
        return float(np.mean((a > 0.5) == (b > 0.5)))
    if task == "multiclass":
        return float(np.mean(a.argmax(axis=1) == b.argmax(axis=1)))
    return float(np.mean(np.abs(a - b) <= 1e-9))


def _split_frame(df: pd.DataFrame, model, split: str) -> pd.DataFrame:
    info = model.train_summary.get("split")
    if split == "all" or info is None:
        return df
    dev_idx, test_idx = model_mod.holdout_split(len(df), int(info["seed"]),
                                                float(info["test_fraction"]))
    return df.iloc[test_idx] if split == "test" else df.iloc[dev_idx]


def _metric(task: str, pred, y) -> float:
    if task == "binary":
        return metrics.roc_auc(pred, y)
    if task == "multiclass":
        return metrics.macro_ovr_auc(pred, y)
    return metrics.r2(pred, y)


def cmd_evaluate(args) -> int:
    if not args.model and not args.rules:
        raise InvalidInputError("evaluate needs --model and/or --rules")
    path = pathlib.Path(args.data)
    if not path.exists():
        raise InvalidInputError(f"dataset not found: {path}")
    df = pd.read_csv(path)

    results = {}
    model = model_mod.load_model(args.model) if args.model else None
    ruleset = logic.load_rules(args.rules) if args.rules else None

    ref = model if model is not None else ruleset
    task = ref.task
    if ruleset is not None and model is not None and ruleset.task != model.task:
        raise SchemaMismatchError("model and rules were built for different tasks")
    missing = [f.name for f in ref.schema.features if f.name not in df.columns]
    if missing or ref.schema.target.name not in df.columns:
        raise SchemaMismatchError(
            f"dataset does not match the artifact's schema (missing: "
            f"{missing or [ref.schema.target.name]})"
        )
    if task == "regression":
        target_vals = pd.to_numeric(df[ref.schema.target.name], errors="coerce")
        if target_vals.isna().any():
            raise SchemaMismatchError("regression artifact given non-numeric targets")

    frame = _split_frame(df, ref, args.split) if model is not None else df
    data = transform(ref.schema, frame)
    y = data.raw_targets if task == "regression" else data.y

    if model is not None:
        pred, _ = model_mod.model_forward(model, data.X)
        results["network"] = _metric(task, pred, y)
    if ruleset is not None:
        pred = logic.rule_eval_bits(ruleset, data.X)
        results["rules"] = _metric(task, pred, y)

    for name, value in results.items():
        print(f"{name} {args.split} metric: {value:.10f}")
    if len(results) == 2:
        gap = abs(results["network"] - results["rules"])
        print(f"network/rules gap: {gap:.2e}")
    if args.out:
        pathlib.Path(args.out).write_text(json.dumps(
            {"split": args.split, "task": task, **results}, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_predict(args) -> int:
    model = model_mod.load_model(args.model)
    path = pathlib.Path(args.data)
    if not path.exists():
        raise InvalidInputError(f"dataset not found: {path}")
    df = pd.read_csv(path)
    pred = model_mod.predict(model, df)
    if model.task == "multiclass":
        out = pd.DataFrame(pred, columns=[f"p_{c}" for c in model.schema.target.classes])
        out["prediction"] = [model.schema.target.classes[i] for i in pred.argmax(axis=1)]
    elif model.task == "binary":
        out = pd.DataFrame({"p_1": pred})
        out["prediction"] = [model.schema.target.classes[int(p > 0.5)] for p in pred]
    else:
        out = pd.DataFrame({"prediction": pred})
    if args.out:
        out.to_csv(args.out, index=False)
        print(f"{len(out)} predictions written to {args.out}")
    else:
        print(out.to_string(index=False))
    return EXIT_OK


def cmd_topk(args) -> int:
    try:
        x = np.array([float(v) for v in args.x.split(",")], dtype=np.float64)
    except ValueError as e:
        raise InvalidInputError(f"could not parse --x: {e}") from e
    c, iters, history = softtopk.residual_history(x, args.k, args.tau, tol=args.tol)
    sol = softtopk.forward(x, args.k, args.tau, tol=args.tol)
    print(f"c = {c:.12g}   iterations = {iters}")
    print("y =", np.array2string(sol.y, precision=6, max_line_width=100))
    print(f"sum(y) - k = {sol.y.sum() - args.k:.3e}")
    print("residual history:")
    for i, r in enumerate(history, start=1):
        print(f"  iter {i:2d}: |sum(y) - k| = {r:.6e}")
    return EXIT_OK


def _overrides(args) -> dict:
    keys = ("seed", "epochs", "bits", "k", "n_nodes", "tau", "lr", "l1",
            "batch_size", "prune_rounds", "prune_fraction", "finetune_epochs",
            "head_warmup_epochs", "val_fraction", "test_fraction", "output_dir")
    out = {}
    for key in keys:
        if hasattr(args, key):
            out[key] = getattr(args, key)
    if getattr(args, "no_skip", False):
        out["skip"] = False
    return out


def build_parser() -> _Parser:
    parser = _Parser(prog="ttrules",
                     description="Sparse truth-table rule models: train, prune, "
                                 "extract exact Boolean rules, evaluate.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_train_flags(p):
        p.add_argument("--config", required=True, help="run-config JSON")
        p.add_argument("--seed", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--bits", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--n-nodes", dest="n_nodes", type=int)
        p.add_argument("--tau", type=float)
        p.add_argument("--lr", type=float)
        p.add_argument("--l1", type=float)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--prune-rounds", dest="prune_rounds", type=int)
        p.add_argument("--prune-fraction", dest="prune_fraction", type=float)
        p.add_argument("--finetune-epochs", dest="finetune_epochs", type=int)
        p.add_argument("--head-warmup-epochs", dest="head_warmup_epochs", type=int)
        p.add_argument("--val-fraction", dest="val_fraction", type=float)
        p.add_argument("--test-fraction", dest="test_fraction", type=float)
        p.add_argument("--no-skip", action="store_true",
                       help="drop the input-to-head skip concatenation")
        p.add_argument("--output-dir", dest="output_dir")

    p_train = sub.add_parser("train", help="split, fit schema, train, prune, save")
    add_train_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_prune = sub.add_parser("prune", help="standalone pruning of a saved model")
    add_train_flags(p_prune)
    p_prune.add_argument("--model", required=True)
    p_prune.add_argument("--out")
    p_prune.set_defaults(func=cmd_prune)

    p_ext = sub.add_parser("extract", help="convert a model to symbolic rules")
    p_ext.add_argument("--model", required=True)
    p_ext.add_argument("--data", required=True,
                       help="CSV whose rows define the don't-care patterns")
    p_ext.add_argument("--format", choices=("dnf", "cnf"), default="dnf")
    p_ext.add_argument("--no-xor", action="store_true",
                       help="disable XOR/XNOR merges in minimization")
    p_ext.add_argument("--out", default="runs/latest")
    p_ext.set_defaults(func=cmd_extract)

    p_eval = sub.add_parser("evaluate", help="score a model and/or rule file")
    p_eval.add_argument("--model")
    p_eval.add_argument("--rules")
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--split", choices=("train", "test", "all"), default="test")
    p_eval.add_argument("--out")
    p_eval.set_defaults(func=cmd_evaluate)

    p_pred = sub.add_parser("predict", help="predictions on raw CSV rows")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--out")
    p_pred.set_defaults(func=cmd_predict)

    p_topk = sub.add_parser("topk", help="debug the relaxed top-k solve")
    p_topk.add_argument("--x", required=True, help="comma-separated scores")
    p_topk.add_argument("--k", type=int, required=True)
    p_topk.add_argument("--tau", type=float, required=True)
    p_topk.add_argument("--tol", type=float, default=1e-5)
    p_topk.set_defaults(func=cmd_topk)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except SchemaMismatchError as e:
        print(f"error: schema mismatch: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except TrainingFailureError as e:
        print(f"error: training failed: {e}", file=sys.stderr)
        return EXIT_TRAINING
    except (InvalidInputError, InvalidConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
