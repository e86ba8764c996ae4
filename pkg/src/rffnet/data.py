"""CSV ingestion, standardization, splitting and the synthetic SE1/SE2 generators."""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ArgumentError, DataError

TASKS = ("regression", "classification")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] = field(default_factory=list)
    task: str = "regression"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise DataError(f"X must be (n, p) and y (n,), got {self.X.shape} and {self.y.shape}")
        if self.task not in TASKS:
            raise ArgumentError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if not self.feature_names:
            self.feature_names = [f"x{j + 1}" for j in range(self.X.shape[1])]
        if len(self.feature_names) != self.X.shape[1]:
            raise DataError(f"{len(self.feature_names)} feature names for {self.X.shape[1]} columns")
        bad = np.flatnonzero(~(np.all(np.isfinite(self.X), axis=1) & np.isfinite(self.y)))
        if bad.size:
            raise DataError(f"row {bad[0]} contains NaN or infinite values")
        if self.task == "classification" and not np.all((self.y == 0) | (self.y == 1)):
            row = int(np.flatnonzero((self.y != 0) & (self.y != 1))[0])
            raise DataError(f"classification target must be 0 or 1 (row {row} has {self.y[row]!r})")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def subset(self, idx):
        return Dataset(self.X[idx], self.y[idx], list(self.feature_names), self.task)


def _resolve_target(header, target):
    if isinstance(target, int) or (isinstance(target, str) and target.lstrip("-").isdigit() and target not in header):
        idx = int(target)
        if not -len(header) <= idx < len(header):
            raise DataError(f"target column index {idx} out of range for {len(header)} columns")
        return idx % len(header)
    if target not in header:
        raise DataError(f"target column {target!r} not found in header {header}")
    return header.index(target)


def load_csv(path, target="y", task="regression") -> Dataset:
    """Read a header-first, comma-delimited CSV file.

    ``target`` is a column name or a 0-based integer index (negative counts
    from the end). Every other column becomes a feature, in file order.
    Row numbers in error messages are 1-based data rows (the header is row 0).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(rows)]
    except StopIteration:
        raise DataError(f"{path} is empty; a header row is required") from None
    t = _resolve_target(header, target)
    names = [h for j, h in enumerate(header) if j != t]
    values = []
    for i, row in enumerate(rows, start=1):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} fields, header has {len(header)}")
        parsed = []
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"non-numeric value {cell!r} at row {i}, column {header[j]!r}") from None
            if not math.isfinite(v):
                raise DataError(f"non-finite value {cell!r} at row {i}, column {header[j]!r}")
            parsed.append(v)
        values.append(parsed)
    if not values:
        raise DataError(f"{path} has no data rows")
    A = np.array(values, dtype=np.float64)
    return Dataset(np.delete(A, t, axis=1), A[:, t], names, task)


def write_csv(ds: Dataset, path, target_name="y"):
    """Write ``ds`` with features first and the target last; floats use ``repr``."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*ds.feature_names, target_name])
        for xi, yi in zip(ds.X, ds.y):
            w.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


@dataclass(frozen=True)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray


def standardize_fit(X) -> StandardizationStats:
    """Column means and sample standard deviations (divisor n - 1).

    Constant columns get ``std = 1`` so they standardize to zero.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError(f"need at least 2 rows to estimate a sample std, got shape {X.shape}")
    mean = X.mean(axis=0)
    std = X.std(axis=0, ddof=1)
    # the float mean of a constant column can be off by an ulp, leaving a
    # tiny nonzero std; pin such columns exactly
    const = np.ptp(X, axis=0) == 0
    mean[const] = X[0, const]
    std[const | ~(std > 0)] = 1.0
    return StandardizationStats(mean, std)


def standardize_apply(X, stats: StandardizationStats):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != stats.mean.shape[0]:
        raise ArgumentError(f"X has {X.shape[-1]} columns, stats have {stats.mean.shape[0]}")
    return (X - stats.mean) / stats.std


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def se1_response(X):
    return np.sin((X[:, 0] + X[:, 2]) ** 2) * np.sin(X[:, 5] * X[:, 6] * X[:, 7])


def se2_response(X):
    return np.log(X[:, 10:15].sum(axis=1) ** 2)


def gen_se1(n, seed, sigma=0.1) -> Dataset:
    """18 standard-normal features; only x1, x3, x6, x7, x8 enter the response."""
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    if sigma < 0:
        raise ArgumentError(f"sigma must be >= 0, got {sigma}")
    rng = _rng(seed)
    X = rng.standard_normal((n, 18))
    y = se1_response(X) + sigma * rng.standard_normal(n)
    return Dataset(X, y)


def gen_se2(n, seed, sigma=0.1) -> Dataset:
    """100 standard-normal features; the response is ``log((x11 + ... + x15)^2)``."""
    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    if sigma < 0:
        raise ArgumentError(f"sigma must be >= 0, got {sigma}")
    rng = _rng(seed)
    X = rng.standard_normal((n, 100))
    bad = X[:, 10:15].sum(axis=1) == 0.0
    while bad.any():
        X[bad] = rng.standard_normal((int(bad.sum()), 100))
        bad = X[:, 10:15].sum(axis=1) == 0.0
    y = se2_response(X) + sigma * rng.standard_normal(n)
    return Dataset(X, y)


def split_threeway(ds: Dataset, sizes, seed):
    """Disjoint seeded (train, val, test) subsets of the requested sizes."""
    n_train, n_val, n_test = (int(v) for v in sizes)
    if min(n_train, n_val, n_test) < 0 or n_train + n_val + n_test > ds.n:
        raise ArgumentError(f"sizes {tuple(sizes)} exceed the {ds.n} available rows")
    perm = _rng(seed).permutation(ds.n)
    a, b = n_train, n_train + n_val
    return (ds.subset(np.sort(perm[:a])), ds.subset(np.sort(perm[a:b])),
            ds.subset(np.sort(perm[b:b + n_test])))
