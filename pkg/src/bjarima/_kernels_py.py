"""NumPy/SciPy implementations of the compiled kernels in ``_kernels.pyx``."""
import numpy as np
from scipy.signal import lfilter


def css_residuals(w, phi, theta):
    w = np.asarray(w, dtype=float)
    p = len(phi)
    if len(w) <= p:
        return np.zeros(0)
    u = w[p:].copy()
    for i, c in enumerate(phi, start=1):
        u -= c * w[p - i : len(w) - i]
    if len(theta) == 0:
        return u
    return lfilter([1.0], np.concatenate(([1.0], theta)), u)


def css_objective(w, phi, theta):
    e = css_residuals(w, phi, theta)
    return float(e @ e)


def arma_filter(eps, phi, theta):
    return lfilter(
        np.concatenate(([1.0], theta)),
        np.concatenate(([1.0], -np.asarray(phi, dtype=float))),
        np.asarray(eps, dtype=float),
    )
