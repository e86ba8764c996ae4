"""Command-line interface: ``rffnet {synth,train,tune,eval,relevances}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .data import gen_se1, gen_se2, load_csv, write_csv
from .errors import RFFNetError, UsageError
from .metrics import auc, evaluate, mse
from .model import fit, load, predict, predict_proba, relevances, save
from .objective import LossKind
from .optimizer import TrainConfig, split_indices

DEFAULT_LRS = (1e-5, 1e-4, 1e-3, 1e-2)
DEFAULT_REGS = (1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1)
GENERATORS = {"se1": gen_se1, "se2": gen_se2}
DEFAULT_LOSS = {"regression": "squared", "classification": "cross-entropy"}


def _default_seed():
    raw = os.environ.get("RFFNET_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"RFFNET_SEED must be an integer, got {raw!r}") from None


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or any(not (v > 0 and math.isfinite(v)) for v in values):
        raise argparse.ArgumentTypeError("grid values must be a non-empty list of positive numbers")
    return values


def _add_data_args(sp):
    sp.add_argument("--data", required=True, type=Path, help="CSV file with a header row")
    sp.add_argument("--target", default="y", help="target column name or 0-based index (default: y)")
    sp.add_argument("--task", choices=("regression", "classification"), default="regression")


def _add_train_args(sp):
    sp.add_argument("--loss", choices=[k.value for k in LossKind], default=None,
                    help="default: squared for regression, cross-entropy for classification")
    sp.add_argument("--patience", type=int, default=10)
    sp.add_argument("--max-epochs", type=int, default=300)
    sp.add_argument("--batch-size", type=int, default=32)
    sp.add_argument("--val-fraction", type=float, default=0.1)
    sp.add_argument("--num-features", type=int, default=None,
                    help="default: floor(sqrt(n) * ln(n)) with n the training-split size")
    sp.add_argument("--lambda-init", type=float, default=None,
                    help="constant initial relevance (default: 1/sqrt(p))")
    sp.add_argument("--seed", type=int, default=None, help="default: $RFFNET_SEED or 0")


def build_parser():
    parser = argparse.ArgumentParser(prog="rffnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="write an SE1 or SE2 synthetic dataset")
    sp.add_argument("kind", choices=sorted(GENERATORS))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sigma", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", type=Path, required=True)

    sp = sub.add_parser("train", help="fit a model")
    _add_data_args(sp)
    _add_train_args(sp)
    sp.add_argument("--lr", type=float, default=1e-3)
    sp.add_argument("--reg", type=float, default=1e-5)
    sp.add_argument("--out", type=Path, required=True, help="model file to write")
    sp.add_argument("--history", type=Path, default=None, help="default: <out>.history.csv")

    sp = sub.add_parser("tune", help="grid search over learning rate and regularization")
    _add_data_args(sp)
    _add_train_args(sp)
    sp.add_argument("--lrs", type=_float_list, default=list(DEFAULT_LRS))
    sp.add_argument("--regs", type=_float_list, default=list(DEFAULT_REGS))
    sp.add_argument("--out", type=Path, required=True, help="grid report to write")

    sp = sub.add_parser("eval", help="evaluate a model on a dataset")
    sp.add_argument("--model", required=True, type=Path)
    sp.add_argument("--data", required=True, type=Path)
    sp.add_argument("--target", default="y")
    sp.add_argument("--task", choices=("regression", "classification"), default=None,
                    help="must match the model's task when given")
    sp.add_argument("--out", type=Path, default=None, help="optional JSON report")

    sp = sub.add_parser("relevances", help="export scaled relevances, sorted descending")
    sp.add_argument("--model", required=True, type=Path)
    sp.add_argument("--out", type=Path, default=None, help="default: stdout")
    return parser


def _config(args, lr, reg):
    seed = args.seed if args.seed is not None else _default_seed()
    return TrainConfig(eta=lr, mu=reg, patience=args.patience, max_epochs=args.max_epochs,
                       batch_size=args.batch_size, val_fraction=args.val_fraction, seed=seed,
                       num_features=args.num_features, lambda_init=args.lambda_init)


def _loss(args):
    loss = LossKind.parse(args.loss or DEFAULT_LOSS[args.task])
    if (args.task == "classification") != (loss is LossKind.CROSS_ENTROPY):
        raise UsageError(f"loss {loss.value!r} does not fit task {args.task!r}")
    return loss


def validation_score(model, X, y, config: TrainConfig):
    """Score on the validation rows ``fit`` held out: MSE or AUC."""
    _, va = split_indices(X.shape[0], config.val_fraction, config.seed)
    if model.task == "classification":
        return auc(y[va], predict(model, X[va]))
    return mse(y[va], predict(model, X[va]))


def cmd_synth(args):
    seed = args.seed if args.seed is not None else _default_seed()
    ds = GENERATORS[args.kind](args.n, seed, args.sigma)
    write_csv(ds, args.out)
    print(f"wrote {ds.n} rows x {ds.p + 1} columns to {args.out}")
    return 0


def write_history(path, model, X_rows, config):
    n_train = model.n_train
    rule = "user" if config.num_features is not None else "auto floor(sqrt(n_train)*ln(n_train))"
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# n_rows={X_rows} n_train={n_train} num_features={model.s} num_features_rule={rule}\n")
        fh.write(f"# backend={kernels.BACKEND} best_epoch={model.best_epoch} best_val_loss={model.best_val_loss!r}\n")
        fh.write("epoch,train_loss,val_loss,seconds\n")
        for rec in model.history:
            fh.write(f"{rec.epoch},{rec.train_loss!r},{rec.val_loss!r},{rec.seconds:.6f}\n")


def cmd_train(args):
    loss = _loss(args)
    config = _config(args, args.lr, args.reg)
    ds = load_csv(args.data, args.target, args.task)
    model = fit(ds.X, ds.y, config, loss, task=args.task, feature_names=ds.feature_names)
    save(model, args.out)
    history = args.history or args.out.with_name(args.out.name + ".history.csv")
    write_history(history, model, ds.n, config)
    score = validation_score(model, ds.X, ds.y, config)
    metric = "val_auc" if args.task == "classification" else "val_mse"
    print(f"model={args.out} history={history} num_features={model.s} epochs={len(model.history)} "
          f"best_epoch={model.best_epoch} {metric}={score!r} seconds={model.history[-1].seconds:.3f}")
    return 0


@dataclass
class GridRow:
    lr: float
    reg: float
    score: float = float("nan")
    status: str = "ok"
    epochs: int = 0


def select_best(rows, criterion):
    """Best successful row; ties go to smaller reg, then smaller lr."""
    ok = [r for r in rows if r.status == "ok" and math.isfinite(r.score)]
    if not ok:
        return None
    sign = 1.0 if criterion == "mse" else -1.0
    return min(ok, key=lambda r: (sign * r.score, r.reg, r.lr))


def run_grid(X, y, task, loss, base: TrainConfig, lrs, regs, feature_names=None, log=None):
    rows = []
    for lr in lrs:
        for reg in regs:
            row = GridRow(lr, reg)
            config = TrainConfig(**{**base.to_dict(), "eta": lr, "mu": reg})
            try:
                model = fit(X, y, config, loss, task=task, feature_names=feature_names)
                row.score = validation_score(model, X, y, config)
                row.epochs = len(model.history)
            except RFFNetError as exc:
                row.status = f"failed: {exc}".replace(",", ";").replace("\n", " ")
            rows.append(row)
            if log:
                log(row)
    return rows


def cmd_tune(args):
    loss = _loss(args)
    base = _config(args, args.lrs[0], args.regs[0])
    ds = load_csv(args.data, args.target, args.task)
    criterion = "auc" if args.task == "classification" else "mse"

    def log(row):
        print(f"lr={row.lr!r} reg={row.reg!r} {criterion}={row.score!r} status={row.status}", file=sys.stderr)

    rows = run_grid(ds.X, ds.y, args.task, loss, base, args.lrs, args.regs, ds.feature_names, log)
    best = select_best(rows, criterion)
    with args.out.open("w", encoding="utf-8") as fh:
        fh.write(f"# criterion={criterion} seed={base.seed} cells={len(rows)}\n")
        if best is not None:
            fh.write(f"# best lr={best.lr!r} reg={best.reg!r} {criterion}={best.score!r}\n")
        fh.write(f"lr,reg,{criterion},epochs,status\n")
        for r in rows:
            fh.write(f"{r.lr!r},{r.reg!r},{r.score!r},{r.epochs},{r.status}\n")
    if best is None:
        print("error: every grid cell failed", file=sys.stderr)
        return 1
    print(f"best lr={best.lr!r} reg={best.reg!r} {criterion}={best.score!r}")
    return 0


def cmd_eval(args):
    model = load(args.model)
    if args.task is not None and args.task != model.task:
        raise UsageError(f"model was trained for {model.task}, not {args.task}")
    ds = load_csv(args.data, args.target, model.task)
    if ds.p != model.p:
        raise RFFNetError(f"dimension mismatch: model expects {model.p} features, data has {ds.p}")
    pred = predict_proba(model, ds.X) if model.task == "classification" else predict(model, ds.X)
    report = evaluate(model.task, ds.y, pred)
    for line in report.lines():
        print(line)
    if args.out:
        args.out.write_text(json.dumps({"task": report.task, "n": report.n, **report.metrics},
                                       sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return 0


def relevance_table(model):
    """(name, scaled relevance) pairs sorted descending; ties keep feature order."""
    rel = relevances(model)
    order = np.argsort(-rel, kind="stable")
    return [(model.feature_names[j], float(rel[j])) for j in order]


def cmd_relevances(args):
    model = load(args.model)
    lines = ["feature,relevance"] + [f"{name},{value!r}" for name, value in relevance_table(model)]
    text = "\n".join(lines) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"synth": cmd_synth, "train": cmd_train, "tune": cmd_tune,
            "eval": cmd_eval, "relevances": cmd_relevances}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (RFFNetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
