"""Backend selection for the hot recursions.

The compiled extension is used when it was built; setting the environment
variable ``BJARIMA_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("BJARIMA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _vec(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def css_residuals(w, phi, theta) -> np.ndarray:
    return _impl.css_residuals(_vec(w), _vec(phi), _vec(theta))


def css_objective(w, phi, theta) -> float:
    return float(_impl.css_objective(_vec(w), _vec(phi), _vec(theta)))


def arma_filter(eps, phi, theta) -> np.ndarray:
    return _impl.arma_filter(_vec(eps), _vec(phi), _vec(theta))
