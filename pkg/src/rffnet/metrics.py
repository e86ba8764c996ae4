"""Test-set metrics: MSE for regression; accuracy, F1 and AUC for classification."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, MetricError


class UndefinedMetricWarning(UserWarning):
    """A metric hit a degenerate case and was set to 0 by convention."""


def _pair(y, yhat):
    y = np.asarray(y, dtype=np.float64).ravel()
    yhat = np.asarray(yhat, dtype=np.float64).ravel()
    if y.shape != yhat.shape:
        raise ArgumentError(f"length mismatch: {y.shape[0]} targets vs {yhat.shape[0]} predictions")
    if y.size == 0:
        raise ArgumentError("metrics need at least one sample")
    return y, yhat


def mse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean((y - yhat) ** 2))


def _binary(y):
    if not np.all((y == 0) | (y == 1)):
        raise ArgumentError("binary labels must be 0 or 1")
    return y.astype(bool)


def accuracy(y, proba, threshold=0.5) -> float:
    y, proba = _pair(y, proba)
    return float(np.mean((proba >= threshold) == _binary(y)))


def f1(y, proba, threshold=0.5) -> float:
    """F1 of the positive class. Returns 0 (and warns) when precision or recall is undefined."""
    y, proba = _pair(y, proba)
    truth = _binary(y)
    pred = proba >= threshold
    tp = int(np.sum(pred & truth))
    n_pred, n_true = int(pred.sum()), int(truth.sum())
    if n_pred == 0 or n_true == 0 or tp == 0:
        if n_pred == 0 or n_true == 0:
            warnings.warn("F1 undefined (no positive predictions or labels); returning 0",
                          UndefinedMetricWarning, stacklevel=2)
        return 0.0
    precision, recall = tp / n_pred, tp / n_true
    return 2 * precision * recall / (precision + recall)


def average_ranks(a):
    """1-based ranks with ties sharing the mean of their positions."""
    _, inverse, counts = np.unique(a, return_inverse=True, return_counts=True)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return (starts + (counts + 1) / 2.0)[inverse]


def auc(y, scores) -> float:
    """Mann-Whitney estimate of P(score+ > score-) + P(tie) / 2 via average ranks."""
    y, scores = _pair(y, scores)
    pos = _binary(y)
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs both classes present")
    r = average_ranks(scores)
    return float((r[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class EvalReport:
    task: str
    n: int
    metrics: dict[str, float] = field(default_factory=dict)

    def lines(self):
        return [f"{k}={v:.10g}" for k, v in self.metrics.items()] + [f"n={self.n}"]


def evaluate(task, y, prediction) -> EvalReport:
    """``prediction`` is the regression output, or positive-class probabilities."""
    y, prediction = _pair(y, prediction)
    if task == "regression":
        return EvalReport(task, y.size, {"mse": mse(y, prediction)})
    if task == "classification":
        out = {"accuracy": accuracy(y, prediction), "f1": f1(y, prediction)}
        try:
            out["auc"] = auc(y, prediction)
        except MetricError:
            out["auc"] = float("nan")
        return EvalReport(task, y.size, out)
    raise ArgumentError(f"unknown task {task!r}")
