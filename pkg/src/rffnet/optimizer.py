"""Block stochastic gradient descent with moment estimation and early stopping.

Each minibatch performs two block updates in Gauss-Seidel order:

1. an Adam step on ``beta`` followed by the proximal map of ``mu |beta|^2``,
   taken with Adam's per-coordinate step sizes;
2. an Adam step on ``lam`` whose gradient is taken at the *updated* ``beta``.

The relevance vector only changes in step 2, so the random features of the
batch are computed once and shared by both gradients.
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ArgumentError, TrainingError
from .objective import LossKind, check_targets, loss_derivative, losses, prox_l2
from .spectral import FourierFeatures, sample_features


def auto_num_features(n: int) -> int:
    """Default feature count ``floor(sqrt(n) * ln(n))``, at least 1."""
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    return max(1, int(math.floor(math.sqrt(n) * math.log(n))))


@dataclass(frozen=True)
class TrainConfig:
    eta: float = 1e-3
    mu: float = 1e-5
    patience: int = 10
    max_epochs: int = 300
    batch_size: int = 32
    val_fraction: float = 0.1
    seed: int = 0
    num_features: int | None = None
    rel_tol: float = 1e-4
    lambda_init: float | None = None
    train_lambda: bool = True
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        checks = [
            (self.eta > 0, "eta must be positive"),
            (self.mu >= 0, "mu must be >= 0"),
            (_posint(self.patience), "patience must be a positive integer"),
            (_posint(self.max_epochs), "max_epochs must be a positive integer"),
            (_posint(self.batch_size), "batch_size must be a positive integer"),
            (0 < self.val_fraction < 1, "val_fraction must lie in (0, 1)"),
            (isinstance(self.seed, (int, np.integer)) and self.seed >= 0, "seed must be a non-negative integer"),
            (self.num_features is None or _posint(self.num_features), "num_features must be a positive integer or None"),
            (self.rel_tol >= 0, "rel_tol must be >= 0"),
            (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1, "moment decay rates must lie in [0, 1)"),
            (self.eps > 0, "eps must be positive"),
            (self.lambda_init is None or math.isfinite(self.lambda_init), "lambda_init must be finite"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ArgumentError(msg)

    def initial_lambda(self, p: int) -> np.ndarray:
        """Constant start ``lambda_init``, or ``1/sqrt(p)`` when unset.

        With standardized inputs ``|x - x'|^2`` is about ``2p``, so the
        ``1/sqrt(p)`` start keeps the initial kernel away from zero.
        """
        value = self.lambda_init if self.lambda_init is not None else 1.0 / math.sqrt(p)
        return np.full(p, float(value))

    def features_for(self, n_train: int) -> int:
        return self.num_features if self.num_features is not None else auto_num_features(n_train)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _posint(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and v >= 1


@dataclass
class MomentState:
    """Adam accumulators for the beta block and the lambda block."""

    m_beta: np.ndarray
    v_beta: np.ndarray
    m_lam: np.ndarray
    v_lam: np.ndarray
    t_beta: int = 0
    t_lam: int = 0

    @classmethod
    def zeros(cls, s, p):
        return cls(np.zeros(s), np.zeros(s), np.zeros(p), np.zeros(p))

    def copy(self):
        return MomentState(self.m_beta.copy(), self.v_beta.copy(), self.m_lam.copy(),
                           self.v_lam.copy(), self.t_beta, self.t_lam)


@dataclass
class TrainState:
    beta: np.ndarray
    lam: np.ndarray
    moments: MomentState

    def copy(self):
        return TrainState(self.beta.copy(), self.lam.copy(), self.moments.copy())


def adam_step(param, grad, m, v, t, eta, beta1, beta2, eps):
    """One bias-corrected Adam update; ``m`` and ``v`` are updated in place.

    Returns the new parameter and the per-coordinate step sizes
    ``eta / (sqrt(v_hat) + eps)`` that were applied to ``m_hat``.
    """
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    step = eta / (np.sqrt(v / (1.0 - beta2**t)) + eps)
    return param - step * m_hat, step


def split_indices(n: int, f: float, seed: int):
    """Sorted (train, validation) row indices; validation size is round-half-up of ``f*n``."""
    if n < 2:
        raise ArgumentError(f"need at least 2 rows to split, got {n}")
    n_val = int(math.floor(f * n + 0.5))
    if n_val < 1 or n - n_val < 1:
        raise ArgumentError(f"val_fraction={f} on n={n} gives degenerate split ({n - n_val}, {n_val})")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def split_train_val(X, y, f: float, seed: int):
    """Split rows into ``((X_train, y_train), (X_val, y_val))``."""
    X = np.asarray(X)
    y = np.asarray(y)
    tr, va = split_indices(X.shape[0], f, seed)
    return (X[tr], y[tr]), (X[va], y[va])


def _shuffle_rng(seed, epoch):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, epoch])))


def epoch_step(state: TrainState, X, y, ff: FourierFeatures, config: TrainConfig, kind, epoch: int = 0):
    """Run one pass over shuffled minibatches, updating ``state`` in place.

    Returns the mean minibatch loss observed before each beta update.
    """
    kind = LossKind.parse(kind)
    n = X.shape[0]
    order = _shuffle_rng(config.seed, epoch).permutation(n)
    mom = state.moments
    eta, b1, b2, eps = config.eta, config.beta1, config.beta2, config.eps
    total = 0.0
    for batch, start in enumerate(range(0, n, config.batch_size)):
        idx = order[start:start + config.batch_size]
        Xb, yb = X[idx], y[idx]
        C, S = kernels.cos_sin_features(Xb * state.lam, ff.omega, ff.phases)

        scores = C @ state.beta
        total += float(losses(kind, yb, scores).sum())
        r = loss_derivative(kind, yb, scores)
        g_beta = C.T @ r / len(idx)
        if not np.all(np.isfinite(g_beta)):
            raise TrainingError(f"non-finite beta gradient at epoch {epoch}, batch {batch}", epoch, batch)
        mom.t_beta += 1
        beta, step = adam_step(state.beta, g_beta, mom.m_beta, mom.v_beta, mom.t_beta, eta, b1, b2, eps)
        # prox in the same diagonal metric as the Adam step, so fixed points
        # satisfy grad + 2 mu beta = 0
        state.beta = prox_l2(beta, step, config.mu)

        if not config.train_lambda:
            continue
        r = loss_derivative(kind, yb, C @ state.beta)
        g_lam = kernels.lambda_grad(Xb, r, S, state.beta, ff.omega)
        if not np.all(np.isfinite(g_lam)):
            raise TrainingError(f"non-finite lambda gradient at epoch {epoch}, batch {batch}", epoch, batch)
        mom.t_lam += 1
        state.lam, _ = adam_step(state.lam, g_lam, mom.m_lam, mom.v_lam, mom.t_lam, eta, b1, b2, eps)
    return total / n


def mean_loss(X, y, beta, lam, ff, kind, chunk=4096):
    """Unregularized mean loss, evaluated in row chunks to bound memory."""
    total = 0.0
    for start in range(0, X.shape[0], chunk):
        Xc = X[start:start + chunk]
        Z = kernels.cos_features(Xc * lam, ff.omega, ff.phases)
        total += float(losses(kind, y[start:start + chunk], Z @ beta).sum())
    return total / X.shape[0]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    seconds: float


@dataclass
class FitResult:
    beta: np.ndarray
    lam: np.ndarray
    ff: FourierFeatures
    best_epoch: int
    best_val_loss: float
    history: list[EpochRecord] = field(default_factory=list)
    n_train: int = 0


def fit_loop(X, y, config: TrainConfig, kind, init=None, ff=None, validation=None, callback=None) -> FitResult:
    """Train until ``patience`` epochs pass without improvement or ``max_epochs`` is hit.

    Parameters
    ----------
    X, y : array_like
        Training data. If ``validation`` is None, a fraction
        ``config.val_fraction`` of it is held out first.
    config : TrainConfig
    kind : LossKind or str
    init : tuple (beta0, lam0), optional
        Defaults to ``beta = 0`` and ``config.initial_lambda(p)``.
    ff : FourierFeatures, optional
        Sampled from ``config.seed`` with ``config.features_for(n_train)``
        features when omitted.
    validation : tuple (X_val, y_val), optional
    callback : callable, optional
        Called with each ``EpochRecord``.

    Returns
    -------
    FitResult
        Parameters of the epoch with the lowest validation loss, never
        simply the last iterate.
    """
    kind = LossKind.parse(kind)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ArgumentError(f"X must be a non-empty matrix, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ArgumentError(f"y must have shape ({X.shape[0]},), got {y.shape}")
    y = check_targets(kind, y)
    if validation is None:
        (X, y), (X_val, y_val) = split_train_val(X, y, config.val_fraction, config.seed)
    else:
        X_val = np.asarray(validation[0], dtype=np.float64)
        y_val = check_targets(kind, validation[1])
        if X_val.ndim != 2 or X_val.shape[1] != X.shape[1] or X_val.shape[0] == 0 or y_val.shape != (X_val.shape[0],):
            raise ArgumentError("validation data must be a non-empty (X, y) pair matching the training columns")
    n, p = X.shape
    if ff is None:
        ff = sample_features(p, config.features_for(n), config.seed)
    elif ff.p != p:
        raise ArgumentError(f"features expect p={ff.p}, data has p={p}")

    if init is None:
        beta0, lam0 = np.zeros(ff.s), config.initial_lambda(p)
    else:
        beta0 = np.array(init[0], dtype=np.float64)
        lam0 = np.array(init[1], dtype=np.float64)
        if beta0.shape != (ff.s,) or lam0.shape != (p,):
            raise ArgumentError(f"init shapes must be ({ff.s},) and ({p},)")
    state = TrainState(beta0, lam0, MomentState.zeros(ff.s, p))

    history = []
    best = None
    best_val = math.inf
    ref_val = math.inf
    stale = 0
    t0 = time.perf_counter()
    for epoch in range(config.max_epochs):
        # overflow is caught by the explicit finiteness checks instead
        with np.errstate(over="ignore", invalid="ignore"):
            train_loss = epoch_step(state, X, y, ff, config, kind, epoch)
            val_loss = mean_loss(X_val, y_val, state.beta, state.lam, ff, kind)
        rec = EpochRecord(epoch, train_loss, val_loss, time.perf_counter() - t0)
        history.append(rec)
        if callback is not None:
            callback(rec)
        if val_loss < best_val:
            best_val = val_loss
            best = (epoch, state.beta.copy(), state.lam.copy())
        if math.isfinite(val_loss) and (ref_val == math.inf or val_loss <= ref_val - config.rel_tol * abs(ref_val)):
            ref_val = val_loss
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    if best is None:
        raise TrainingError("validation loss was never finite", epoch=len(history) - 1)
    return FitResult(best[1], best[2], ff, best[0], best_val, history, n)


def with_overrides(config: TrainConfig, **kw) -> TrainConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
