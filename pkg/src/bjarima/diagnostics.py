"""Residual diagnostics, fit metrics and the seeded ARIMA simulator.

The simulator draws innovations from NumPy's ``Generator(PCG64(seed))``
via ``standard_normal``; PCG64 output is stable across platforms and NumPy
releases, which keeps the Monte Carlo acceptance numbers reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSeries, DomainError, InsufficientData
from .estimation import ArimaOrder, is_invertible, is_stationary
from .series import DEFAULT_START, TimeSeries, acf, as_values

DEFAULT_BINS = 12


@dataclass(frozen=True)
class FitMetrics:
    me: float
    rmse: float
    mae: float
    residual_acf1: float
    degenerate: bool = False


@dataclass(frozen=True)
class HistogramData:
    bin_edges: np.ndarray
    counts: np.ndarray
    mean_marker: float


def residual_metrics(residuals) -> FitMetrics:
    """ME, RMSE, MAE and lag-1 autocorrelation of residuals (actual - fitted)."""
    e = as_values(residuals)
    if len(e) < 2:
        raise InsufficientData("need at least two residuals")
    me = float(e.mean())
    rmse = float(math.sqrt(np.mean(e * e)))
    mae = float(np.mean(np.abs(e)))
    try:
        acf1 = float(acf(e, 1).coefficients[1])
        degenerate = False
    except DegenerateSeries:
        acf1, degenerate = 0.0, True
    return FitMetrics(me, rmse, mae, acf1, degenerate)


def histogram(residuals, bins: int = DEFAULT_BINS) -> HistogramData:
    e = as_values(residuals)
    if len(e) == 0:
        raise InsufficientData("histogram of an empty residual set")
    if bins < 1:
        raise ValueError("bins must be positive")
    # numpy already widens a zero span by +-0.5 and closes only the last bin
    counts, edges = np.histogram(e, bins=bins)
    return HistogramData(edges, counts.astype(int), float(e.mean()))


def burn_in(order: ArimaOrder) -> int:
    return max(200, 10 * (order.p + order.q))


def simulate_arima(
    order: ArimaOrder,
    phi=(),
    theta=(),
    mean: float = 0.0,
    sigma: float = 1.0,
    n: int = 100,
    seed: int = 0,
    start=DEFAULT_START,
    name: str = "simulated",
) -> TimeSeries:
    """Draw ``n`` observations of a Gaussian ARIMA process.

    ``mean`` is the level of the d-times differenced (ARMA) part. The ARMA
    recursion runs through a discarded burn-in before d-fold cumulative
    summation.
    """
    if not isinstance(order, ArimaOrder):
        order = ArimaOrder(*order)
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if len(phi) != order.p or len(theta) != order.q:
        raise DomainError(f"coefficient lengths do not match order {order}")
    if not is_stationary(phi):
        raise DomainError(f"AR coefficients {phi.tolist()} are not stationary")
    if not is_invertible(theta):
        raise DomainError(f"MA coefficients {theta.tolist()} are not invertible")
    if sigma < 0 or n < 1:
        raise DomainError("need sigma >= 0 and n >= 1")
    burn = burn_in(order)
    rng = np.random.Generator(np.random.PCG64(seed))
    eps = sigma * rng.standard_normal(n + burn)
    y = kernels.arma_filter(eps, phi, theta)[burn:] + mean
    for _ in range(order.d):
        y = np.cumsum(y)
    return TimeSeries.from_values(y, start=start, name=name)
