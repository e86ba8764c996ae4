"""Losses, the regularized training objective and its block gradients."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import ArgumentError
from .spectral import FourierFeatures


class LossKind(str, Enum):
    SQUARED = "squared"
    CROSS_ENTROPY = "cross-entropy"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ArgumentError(f"unknown loss {value!r}; expected one of {[k.value for k in cls]}") from None


@dataclass
class ObjectiveParams:
    beta: np.ndarray
    lam: np.ndarray
    mu: float = 0.0

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=np.float64)
        self.lam = np.asarray(self.lam, dtype=np.float64)
        if self.mu < 0:
            raise ArgumentError(f"mu must be >= 0, got {self.mu}")


def sigmoid(t):
    """Logistic function, evaluated without overflow for large ``|t|``."""
    t = np.asarray(t, dtype=np.float64)
    e = np.exp(-np.abs(t))
    return np.where(t >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def check_targets(kind, y):
    kind = LossKind.parse(kind)
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ArgumentError("targets must be finite")
    if kind is LossKind.CROSS_ENTROPY and not np.all((y == 0) | (y == 1)):
        raise ArgumentError("cross-entropy targets must be 0 or 1")
    return y


def losses(kind, y, scores):
    """Per-sample loss. Cross-entropy takes raw logits as scores."""
    kind = LossKind.parse(kind)
    scores = np.asarray(scores, dtype=np.float64)
    if kind is LossKind.SQUARED:
        return (y - scores) ** 2
    # y * softplus(-t) + (1 - y) * softplus(t)
    return y * np.logaddexp(0.0, -scores) + (1.0 - y) * np.logaddexp(0.0, scores)


def loss_derivative(kind, y, scores):
    """Derivative of the per-sample loss with respect to the score."""
    kind = LossKind.parse(kind)
    if kind is LossKind.SQUARED:
        return 2.0 * (scores - y)
    return sigmoid(scores) - y


def loss_value(kind, y, score) -> float:
    y = check_targets(kind, np.atleast_1d(y))
    return float(losses(kind, y, np.atleast_1d(score))[0])


def _check_shapes(X, y, params, ff):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ArgumentError(f"X must be a non-empty matrix, got shape {X.shape}")
    n, p = X.shape
    if p != ff.p or params.lam.shape != (p,):
        raise ArgumentError(f"dimension mismatch: X has {p} columns, features expect {ff.p}, lambda has {params.lam.shape}")
    if params.beta.shape != (ff.s,):
        raise ArgumentError(f"beta must have shape ({ff.s},), got {params.beta.shape}")
    if np.shape(y) != (n,):
        raise ArgumentError(f"y must have shape ({n},), got {np.shape(y)}")
    return X


def objective_value(X, y, params: ObjectiveParams, ff: FourierFeatures, kind) -> float:
    """Mean loss of ``beta . z(lam * x_i)`` plus ``mu * |beta|^2``."""
    X = _check_shapes(X, y, params, ff)
    y = check_targets(kind, y)
    Z = kernels.cos_features(X * params.lam, ff.omega, ff.phases)
    data_term = float(np.mean(losses(kind, y, Z @ params.beta)))
    return data_term + params.mu * float(params.beta @ params.beta)


def gradients(X, y, params: ObjectiveParams, ff: FourierFeatures, kind):
    """Gradients of the unregularized mean loss with respect to beta and lambda.

    The ``mu * |beta|^2`` term is deliberately left out; the optimizer
    handles it with a proximal step.
    """
    X = _check_shapes(X, y, params, ff)
    y = check_targets(kind, y)
    C, S = kernels.cos_sin_features(X * params.lam, ff.omega, ff.phases)
    r = loss_derivative(kind, y, C @ params.beta)
    grad_beta = C.T @ r / X.shape[0]
    grad_lambda = kernels.lambda_grad(X, r, S, params.beta, ff.omega)
    return grad_beta, grad_lambda


def prox_l2(v, eta, mu: float) -> np.ndarray:
    """argmin_u  eta * mu * |u|^2 + 0.5 * |u - v|^2  =  v / (1 + 2 eta mu).

    ``eta`` may be a vector of per-coordinate step sizes; the problem is
    separable, so the same formula applies componentwise.
    """
    eta = np.asarray(eta, dtype=np.float64)
    if not np.all(eta > 0):
        raise ArgumentError(f"eta must be positive, got {eta}")
    if mu < 0:
        raise ArgumentError(f"mu must be >= 0, got {mu}")
    return np.asarray(v, dtype=np.float64) / (1.0 + 2.0 * eta * mu)
