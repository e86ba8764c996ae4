"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``RFFNET_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the numpy implementation is used. ``BACKEND`` names the choice.
"""

import os

import numpy as np

from . import _kernels_py

_force_py = os.environ.get("RFFNET_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def cos_features(XL, omega, phases, impl=None):
    impl = impl or _impl
    return impl.cos_features(_c(XL), _c(omega), _c(phases))


def cos_sin_features(XL, omega, phases, impl=None):
    impl = impl or _impl
    return impl.cos_sin_features(_c(XL), _c(omega), _c(phases))


def lambda_grad(X, r, S, beta, omega, impl=None):
    impl = impl or _impl
    return impl.lambda_grad(_c(X), _c(r), _c(S), _c(beta), _c(omega))


def available_backends():
    """Map backend name to implementation module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out


def predict_scores(XL, omega, phases, beta, impl=None):
    impl = impl or _impl
    return impl.predict_scores(_c(XL), _c(omega), _c(phases), _c(beta))
