"""Point forecasts and psi-weight prediction intervals for fitted ARIMA models."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .estimation import ArimaModel
from .series import TimeSeries, as_values, difference_values, integrate_values
from .stattests import norm_quantile


@dataclass(frozen=True)
class ForecastResult:
    horizons: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    origin_date: dt.date | None
    dates: tuple = ()

    @property
    def half_width(self) -> np.ndarray:
        return self.upper - self.point


def integrated_ar(phi, d: int) -> np.ndarray:
    """AR coefficients of phi(B)(1-B)^d written as 1 - sum(c_i B^i)."""
    poly = np.concatenate(([1.0], -np.asarray(phi, dtype=float)))
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    return -poly[1:]


def psi_coefficients(phi, theta, d: int, count: int) -> np.ndarray:
    ar = integrated_ar(phi, d)
    theta = np.asarray(theta, dtype=float)
    psi = np.zeros(count)
    psi[0] = 1.0
    for j in range(1, count):
        acc = theta[j - 1] if j <= len(theta) else 0.0
        for i in range(1, min(j, len(ar)) + 1):
            acc += ar[i - 1] * psi[j - i]
        psi[j] = acc
    return psi


def psi_weights(model: ArimaModel, count: int) -> np.ndarray:
    """psi_0..psi_{count-1} of the model's MA(infinity) form on the original scale."""
    if count < 1:
        raise DomainError("count must be positive")
    return psi_coefficients(model.phi, model.theta, model.order.d, count)


def forecast(
    model: ArimaModel,
    history,
    h: int,
    level: float = 0.80,
    clamp: tuple[float, float] | None = None,
) -> ForecastResult:
    """h-step forecasts with a central ``level`` Gaussian prediction interval.

    ``clamp`` bounds the returned values for display only (e.g. ``(0, 100)``
    for percentages); it is off by default.
    """
    if h < 1:
        raise DomainError(f"horizon must be >= 1, got {h}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    x = as_values(history)
    p, d, q = model.order
    mu = model.mean or 0.0
    wc = difference_values(x, d) - mu
    n = len(wc)
    # innovations implied by the model on this history (zero before the first AR lag)
    resid = kernels.css_residuals(wc, model.phi, model.theta)
    w_ext = np.concatenate((wc, np.zeros(h)))
    e_ext = np.concatenate((np.zeros(n - len(resid)), resid, np.zeros(h)))
    for s in range(n, n + h):
        acc = 0.0
        for i in range(1, p + 1):
            if s - i >= 0:
                acc += model.phi[i - 1] * w_ext[s - i]
        for j in range(1, q + 1):
            if s - j >= 0:
                acc += model.theta[j - 1] * e_ext[s - j]
        w_ext[s] = acc
    point = w_ext[n:] + mu
    if d:
        point = integrate_values(point, x[-d:])

    z = norm_quantile(0.5 * (1.0 + level))
    psi = psi_weights(model, h)
    half = z * model.sigma * np.sqrt(np.cumsum(psi**2))
    lower, upper = point - half, point + half
    if clamp is not None:
        point, lower, upper = (np.clip(a, *clamp) for a in (point, lower, upper))

    origin = history.dates[-1] if isinstance(history, TimeSeries) else None
    dates = (
        tuple(origin + dt.timedelta(days=i) for i in range(1, h + 1)) if origin else ()
    )
    return ForecastResult(np.arange(1, h + 1), point, lower, upper, level, origin, dates)
