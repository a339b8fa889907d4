# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the ARMA residual and simulation recursions."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def css_residuals(const double[::1] w, const double[::1] phi, const double[::1] theta):
    cdef Py_ssize_t n = w.shape[0], p = phi.shape[0], q = theta.shape[0]
    cdef Py_ssize_t t, i, j, m = n - p if n > p else 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m)
    cdef double[::1] e = out
    cdef double acc
    for t in range(m):
        acc = w[t + p]
        for i in range(p):
            acc -= phi[i] * w[t + p - 1 - i]
        for j in range(q if q < t else t):
            acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
    return out


def css_objective(const double[::1] w, const double[::1] phi, const double[::1] theta):
    cdef Py_ssize_t n = w.shape[0], p = phi.shape[0], q = theta.shape[0]
    cdef Py_ssize_t t, i, j, m = n - p if n > p else 0
    cdef double[::1] e = np.zeros(m)
    cdef double acc, total = 0.0
    for t in range(m):
        acc = w[t + p]
        for i in range(p):
            acc -= phi[i] * w[t + p - 1 - i]
        for j in range(q if q < t else t):
            acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
        total += acc * acc
    return total


def arma_filter(const double[::1] eps, const double[::1] phi, const double[::1] theta):
    """Zero-mean ARMA output driven by ``eps``; pre-sample state is zero."""
    cdef Py_ssize_t n = eps.shape[0], p = phi.shape[0], q = theta.shape[0]
    cdef Py_ssize_t t, i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[::1] y = out
    cdef double acc
    for t in range(n):
        acc = eps[t]
        for j in range(q if q < t else t):
            acc += theta[j] * eps[t - 1 - j]
        for i in range(p if p < t else t):
            acc += phi[i] * y[t - 1 - i]
        y[t] = acc
    return out
