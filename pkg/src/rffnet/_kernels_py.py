"""Pure-numpy implementation of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or when
``RFFNET_PURE_PYTHON=1`` is set. Signatures match the extension exactly.
"""

import numpy as np


def cos_features(XL, omega, phases):
    """Return ``sqrt(2/s) * cos(XL @ omega.T + phases)`` as an (m, s) array."""
    s = omega.shape[0]
    U = XL @ omega.T
    U += phases
    np.cos(U, out=U)
    U *= np.sqrt(2.0 / s)
    return U


def cos_sin_features(XL, omega, phases):
    """Return the cosine features and the matching sine features (same scale)."""
    s = omega.shape[0]
    U = XL @ omega.T
    U += phases
    scale = np.sqrt(2.0 / s)
    C = np.cos(U)
    C *= scale
    np.sin(U, out=U)
    U *= scale
    return C, U


def lambda_grad(X, r, S, beta, omega):
    """Mean over rows of ``r_i * d(beta . z(lam * x_i)) / d lam``.

    ``S`` holds the scaled sine features at the current relevances, so the
    derivative of feature k with respect to lam_j is ``-S_ik * omega_kj * x_ij``.
    """
    m = X.shape[0]
    M = (S * beta) @ omega
    M *= X
    return -(r @ M) / m


def predict_scores(XL, omega, phases, beta):
    """``beta . z(XL_i)`` for every row, computed so each row's value does not
    depend on which other rows share the call (BLAS matmul does not promise that).
    """
    s, p = omega.shape
    U = np.empty((XL.shape[0], s))
    U[:] = phases
    for j in range(p):
        U += XL[:, j, None] * omega[:, j]
    np.cos(U, out=U)
    U *= np.sqrt(2.0 / s) * beta
    return U.sum(axis=1)
