"""Random Fourier features for ARD kernels.

Frequencies are drawn once from the spectral density of the unit-relevance
kernel. Relevances then enter only as a scaling of the inputs, so the same
frozen ``FourierFeatures`` approximate the ARD kernel for every relevance
vector: ``k_lam(x, y) ~ z(lam * x) . z(lam * y)``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import ArgumentError, NumericalError

RNG_ID = "numpy.random.PCG64"
TWO_PI = 2.0 * np.pi


def gaussian_spectral_sampler(rng, shape):
    """Spectral density of ``exp(-|d|^2 / 2)``: the standard normal."""
    return rng.standard_normal(shape)


SPECTRAL_SAMPLERS = {"gaussian": gaussian_spectral_sampler}


@dataclass(frozen=True)
class FourierFeatures:
    """Frozen randomness of the feature map.

    Attributes
    ----------
    omega : ndarray, shape (s, p)
        Frequencies drawn from the unit-relevance spectral density.
    phases : ndarray, shape (s,)
        Phase offsets in ``[0, 2*pi)``.
    """

    omega: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=np.float64, order="C")
        phases = np.array(self.phases, dtype=np.float64)
        if omega.ndim != 2 or omega.shape[0] < 1 or omega.shape[1] < 1:
            raise ArgumentError(f"omega must be a non-empty (s, p) matrix, got shape {omega.shape}")
        if phases.shape != (omega.shape[0],):
            raise ArgumentError(f"phases must have shape ({omega.shape[0]},), got {phases.shape}")
        if not (np.all(np.isfinite(omega)) and np.all((phases >= 0) & (phases < TWO_PI))):
            raise ArgumentError("omega must be finite and phases must lie in [0, 2*pi)")
        omega.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "phases", phases)

    @property
    def s(self) -> int:
        return self.omega.shape[0]

    @property
    def p(self) -> int:
        return self.omega.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FourierFeatures):
            return NotImplemented
        return np.array_equal(self.omega, other.omega) and np.array_equal(self.phases, other.phases)

    __hash__ = None


def sample_features(p: int, s: int, seed: int, sampler: str | Callable = "gaussian") -> FourierFeatures:
    """Draw ``s`` frequencies in dimension ``p`` and ``s`` uniform phases.

    The generator is PCG64 seeded with ``seed``; frequencies are drawn before
    phases, so the output is a pure function of ``(p, s, seed, sampler)``.
    """
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise ArgumentError(f"dimension p must be a positive integer, got {p!r}")
    if not (isinstance(s, (int, np.integer)) and s >= 1):
        raise ArgumentError(f"feature count s must be a positive integer, got {s!r}")
    if isinstance(sampler, str):
        try:
            sampler = SPECTRAL_SAMPLERS[sampler]
        except KeyError:
            raise ArgumentError(f"unknown spectral sampler {sampler!r}") from None
    rng = np.random.Generator(np.random.PCG64(seed))
    omega = np.asarray(sampler(rng, (int(s), int(p))), dtype=np.float64)
    phases = TWO_PI * rng.random(int(s))
    # rounding can land exactly on 2*pi
    phases[phases >= TWO_PI] = 0.0
    return FourierFeatures(omega, phases)


def _vector(x, name, p=None):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ArgumentError(f"{name} must be a vector, got shape {x.shape}")
    if p is not None and x.shape[0] != p:
        raise ArgumentError(f"{name} has length {x.shape[0]}, expected {p}")
    return x


def rff_map(x, ff: FourierFeatures) -> np.ndarray:
    """Feature vector ``sqrt(2/s) * cos(omega @ x + phases)`` of one input."""
    x = _vector(x, "x", ff.p)
    if not np.all(np.isfinite(x)):
        raise ArgumentError("x must be finite")
    return kernels.cos_features(x[None, :], ff.omega, ff.phases)[0]


def feature_matrix(X, ff: FourierFeatures, lam=None) -> np.ndarray:
    """Row-wise feature map of ``lam * X``; ``lam=None`` means unit relevances."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != ff.p:
        raise ArgumentError(f"X must have shape (m, {ff.p}), got {X.shape}")
    if lam is not None:
        X = X * _vector(lam, "lambda", ff.p)
    return kernels.cos_features(X, ff.omega, ff.phases)


def approx_kernel(x, y, lam, ff: FourierFeatures) -> float:
    """Random-feature estimate ``z(lam * x) . z(lam * y)`` of the ARD kernel."""
    x = _vector(x, "x", ff.p)
    y = _vector(y, "y", ff.p)
    lam = _vector(lam, "lambda", ff.p)
    Z = kernels.cos_features(np.vstack([lam * x, lam * y]), ff.omega, ff.phases)
    return float(Z[0] @ Z[1])


def ard_gaussian_kernel(x, y, lam) -> float:
    """Exact ARD Gaussian kernel ``exp(-0.5 * sum(lam_j^2 (x_j - y_j)^2))``."""
    x = _vector(x, "x")
    y = _vector(y, "y", x.shape[0])
    lam = _vector(lam, "lambda", x.shape[0])
    d = lam * (x - y)
    return float(np.exp(-0.5 * (d @ d)))


def scaled_frequency_sample(ff: FourierFeatures, lam) -> np.ndarray:
    """Rows ``lam * omega_i``: frequencies distributed per the ARD spectral density."""
    lam = _vector(lam, "lambda", ff.p)
    return ff.omega * lam


def scaled_importance(lam) -> np.ndarray:
    """``|lam| / max|lam|``, or all zeros when ``lam`` is identically zero."""
    a = np.abs(np.asarray(lam, dtype=np.float64))
    top = a.max() if a.size else 0.0
    if top == 0.0:
        return np.zeros_like(a)
    return a / top


class ARDGaussianKernel:
    """Exact ARD Gaussian kernel as a pair callable with a vectorized Gram matrix."""

    def __init__(self, lam):
        self.lam = np.asarray(lam, dtype=np.float64)

    def __call__(self, x, y):
        return ard_gaussian_kernel(x, y, self.lam)

    def gram(self, A, B):
        A = np.asarray(A, dtype=np.float64) * self.lam
        B = np.asarray(B, dtype=np.float64) * self.lam
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-0.5 * np.maximum(sq, 0.0))


class ApproxARDKernel:
    """Random-feature ARD kernel ``z(lam * x) . z(lam * y)`` for fixed features."""

    def __init__(self, ff: FourierFeatures, lam):
        self.ff = ff
        self.lam = _vector(lam, "lambda", ff.p)

    def __call__(self, x, y):
        return approx_kernel(x, y, self.lam, self.ff)

    def gram(self, A, B):
        return feature_matrix(A, self.ff, self.lam) @ feature_matrix(B, self.ff, self.lam).T


@dataclass
class KRRPredictor:
    """Exact kernel ridge regression solution ``f(x) = sum_i alpha_i k(x_i, x)``."""

    X: np.ndarray
    alpha: np.ndarray
    kernel: Callable

    def __call__(self, Xnew):
        Xnew = np.atleast_2d(np.asarray(Xnew, dtype=np.float64))
        return _gram(self.kernel, Xnew, self.X) @ self.alpha


def _gram(kernel, A, B):
    if hasattr(kernel, "gram"):
        return np.asarray(kernel.gram(A, B), dtype=np.float64)
    return np.array([[kernel(a, b) for b in B] for a in A], dtype=np.float64)


def krr_oracle(X, y, kernel, mu: float, rtol: float = 1e-8) -> KRRPredictor:
    """Solve ``(K + n*mu*I) alpha = y`` densely.

    Only meant as a reference for small problems. ``kernel`` is a pair
    callable ``k(x, y)``; if it also exposes ``gram(A, B)`` that is used
    to build the kernel matrix.

    Raises
    ------
    NumericalError
        If the relative residual of the solve exceeds ``rtol``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if y.shape != (n,):
        raise ArgumentError(f"y must have shape ({n},), got {y.shape}")
    if not mu > 0:
        raise ArgumentError(f"mu must be positive, got {mu}")
    A = _gram(kernel, X, X) + n * mu * np.eye(n)
    try:
        alpha = np.linalg.solve(A, y)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"kernel system is singular: {exc}") from exc
    resid = np.linalg.norm(A @ alpha - y)
    if not resid <= rtol * max(np.linalg.norm(y), np.finfo(float).tiny):
        raise NumericalError(f"relative residual {resid / np.linalg.norm(y):.3e} exceeds {rtol:.1e}")
    return KRRPredictor(X, alpha, kernel)
