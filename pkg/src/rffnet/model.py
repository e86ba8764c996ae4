"""The RFFNet estimator: fitting, prediction, relevances and the model file format.

Model file layout (all integers and floats little-endian)::

    uint8    format version
    4 bytes  magic b"RFFN"
    uint32   header length H
    H bytes  UTF-8 JSON header (dimensions, loss, task, rng id, config, ...)
    float64  omega (s*p, row-major), phases (s), beta (s), lambda (p),
             mean (p), std (p)
    uint32   CRC-32 of every preceding byte
"""

import json
import os
import struct
import tempfile
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .data import StandardizationStats, standardize_apply, standardize_fit
from .errors import ArgumentError, DataError, SerializationError, UsageError
from .objective import LossKind, sigmoid
from .optimizer import EpochRecord, TrainConfig, fit_loop, split_indices
from .spectral import RNG_ID, FourierFeatures, sample_features, scaled_importance

FORMAT_VERSION = 1
MAGIC = b"RFFN"
_PREFIX = struct.Struct("<B4sI")
_CRC = struct.Struct("<I")
_F8 = np.dtype("<f8")


@dataclass
class ModelState:
    ff: FourierFeatures
    beta: np.ndarray
    lam: np.ndarray
    loss: LossKind
    stats: StandardizationStats
    task: str = "regression"
    feature_names: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    n_train: int = 0
    best_epoch: int = -1
    best_val_loss: float = float("nan")
    rng: str = RNG_ID
    history: list[EpochRecord] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        self.loss = LossKind.parse(self.loss)
        s, p = self.ff.s, self.ff.p
        self.beta = np.asarray(self.beta, dtype=np.float64)
        self.lam = np.asarray(self.lam, dtype=np.float64)
        shapes = [self.beta.shape == (s,), self.lam.shape == (p,),
                  self.stats.mean.shape == (p,), self.stats.std.shape == (p,)]
        if not all(shapes):
            raise ArgumentError(f"inconsistent model dimensions for s={s}, p={p}")
        if not self.feature_names:
            self.feature_names = [f"x{j + 1}" for j in range(p)]

    @property
    def p(self):
        return self.ff.p

    @property
    def s(self):
        return self.ff.s


def _check_matrix(X, name="X"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DataError(f"{name} must be a matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        row = int(np.flatnonzero(~np.all(np.isfinite(X), axis=1))[0])
        raise DataError(f"{name} row {row} contains NaN or infinite values")
    return X


def _stats_for(X_train):
    if X_train.shape[0] >= 2:
        return standardize_fit(X_train)
    # a single row has no sample std; centre only
    return StandardizationStats(X_train.mean(axis=0), np.ones(X_train.shape[1]))


def fit(X, y, config: TrainConfig | None = None, loss="squared", *, task=None,
        validation=None, feature_names=None, callback=None) -> ModelState:
    """Fit on raw-unit inputs.

    The validation rows are split off first (unless ``validation`` is given),
    then inputs are standardized with training-split statistics only.
    """
    config = config or TrainConfig()
    loss = LossKind.parse(loss)
    task = task or ("classification" if loss is LossKind.CROSS_ENTROPY else "regression")
    X = _check_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise ArgumentError(f"y must have shape ({X.shape[0]},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DataError("y contains NaN or infinite values")
    if validation is None:
        tr, va = split_indices(X.shape[0], config.val_fraction, config.seed)
        X_tr, y_tr, X_va, y_va = X[tr], y[tr], X[va], y[va]
    else:
        X_tr, y_tr = X, y
        X_va = _check_matrix(validation[0], "validation X")
        y_va = np.asarray(validation[1], dtype=np.float64)
    stats = _stats_for(X_tr)
    Xs_tr = standardize_apply(X_tr, stats)
    Xs_va = standardize_apply(X_va, stats)
    ff = sample_features(X.shape[1], config.features_for(X_tr.shape[0]), config.seed)
    res = fit_loop(Xs_tr, y_tr, config, loss, ff=ff, validation=(Xs_va, y_va), callback=callback)
    return ModelState(ff, res.beta, res.lam, loss, stats, task, list(feature_names or []),
                      config.to_dict(), X_tr.shape[0], res.best_epoch, res.best_val_loss,
                      history=res.history)


def predict(model: ModelState, X, chunk: int = 2048) -> np.ndarray:
    """Raw scores ``beta . z(lam * standardize(x))``; logits for classifiers.

    Each row's value is independent of the other rows in ``X``.
    """
    X = _check_matrix(X)
    if X.shape[1] != model.p:
        raise ArgumentError(f"model expects {model.p} features, got {X.shape[1]}")
    XL = standardize_apply(X, model.stats) * model.lam
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], chunk):
        out[start:start + chunk] = kernels.predict_scores(
            XL[start:start + chunk], model.ff.omega, model.ff.phases, model.beta)
    return out


def predict_proba(model: ModelState, X) -> np.ndarray:
    if model.loss is not LossKind.CROSS_ENTROPY:
        raise UsageError("predict_proba needs a model trained with the cross-entropy loss")
    return sigmoid(predict(model, X))


def relevances(model: ModelState) -> np.ndarray:
    """Feature importances ``|lam| / max|lam|`` in [0, 1]."""
    return scaled_importance(model.lam)


def _header(model: ModelState) -> dict:
    return {
        "s": model.s,
        "p": model.p,
        "loss": model.loss.value,
        "task": model.task,
        "rng": model.rng,
        "feature_names": model.feature_names,
        "config": model.config,
        "n_train": model.n_train,
        "best_epoch": model.best_epoch,
        "best_val_loss": model.best_val_loss,
    }


def to_bytes(model: ModelState) -> bytes:
    header = json.dumps(_header(model), sort_keys=True, separators=(",", ":")).encode("utf-8")
    arrays = [model.ff.omega, model.ff.phases, model.beta, model.lam, model.stats.mean, model.stats.std]
    body = b"".join(np.ascontiguousarray(a, dtype=_F8).tobytes() for a in arrays)
    blob = _PREFIX.pack(FORMAT_VERSION, MAGIC, len(header)) + header + body
    return blob + _CRC.pack(zlib.crc32(blob))


def from_bytes(blob: bytes) -> ModelState:
    if len(blob) < _PREFIX.size + _CRC.size:
        raise SerializationError(f"model file truncated ({len(blob)} bytes)")
    version, magic, hlen = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise SerializationError("not an rffnet model file (bad magic)")
    if version != FORMAT_VERSION:
        raise SerializationError(f"unsupported model format version {version} (expected {FORMAT_VERSION})")
    (crc,) = _CRC.unpack_from(blob, len(blob) - _CRC.size)
    if zlib.crc32(blob[:-_CRC.size]) != crc:
        raise SerializationError("model file corrupt or truncated (checksum mismatch)")
    try:
        header = json.loads(blob[_PREFIX.size:_PREFIX.size + hlen].decode("utf-8"))
        s, p = int(header["s"]), int(header["p"])
    except (UnicodeDecodeError, ValueError, KeyError, TypeError) as exc:
        raise SerializationError(f"unreadable model header: {exc}") from exc
    sizes = [s * p, s, s, p, p, p]
    start = _PREFIX.size + hlen
    if len(blob) - _CRC.size - start != 8 * sum(sizes):
        raise SerializationError(f"payload size does not match header dimensions s={s}, p={p}")
    flat = np.frombuffer(blob, dtype=_F8, count=sum(sizes), offset=start).astype(np.float64)
    parts = np.split(flat, np.cumsum(sizes)[:-1])
    try:
        ff = FourierFeatures(parts[0].reshape(s, p), parts[1])
        return ModelState(ff, parts[2], parts[3], header["loss"],
                          StandardizationStats(parts[4], parts[5]), header["task"],
                          header["feature_names"], header["config"], header["n_train"],
                          header["best_epoch"], header["best_val_loss"], header["rng"])
    except (ArgumentError, KeyError) as exc:
        raise SerializationError(f"inconsistent model file: {exc}") from exc


def save(model: ModelState, path) -> None:
    """Write atomically: a failed save never leaves a partial file at ``path``."""
    path = Path(path)
    data = to_bytes(model)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path) -> ModelState:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise SerializationError(f"cannot read model file {path}: {exc}") from exc
    return from_bytes(blob)
