"""Time-series container, differencing, imputation and correlograms."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSeries,
    DimensionMismatch,
    ImputationImpossible,
    InsufficientData,
    NumericalDegeneracy,
)

DEFAULT_START = dt.date(2020, 4, 1)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_dates(dates: tuple) -> None:
    for a, b in zip(dates, dates[1:]):
        if not b > a:
            raise ValueError(f"dates must be strictly increasing ({a} then {b})")


def daily_dates(n: int, start: dt.date = DEFAULT_START) -> tuple:
    return tuple(start + dt.timedelta(days=i) for i in range(n))


@dataclass(frozen=True)
class TimeSeries:
    """Ordered (date, value) observations for one named series.

    Values are treated as equally spaced by index even when the calendar
    dates have gaps.
    """

    dates: tuple
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        dates = tuple(self.dates)
        values = _frozen(self.values)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if len(dates) != len(values):
            raise DimensionMismatch(
                f"{len(dates)} dates but {len(values)} values"
            )
        if len(values) < 1:
            raise InsufficientData("a series needs at least one observation")
        if np.isnan(values).any():
            raise ValueError("TimeSeries cannot hold missing values; impute first")
        _check_dates(dates)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values, start: dt.date = DEFAULT_START, name: str = ""):
        values = np.asarray(values, dtype=float)
        return cls(daily_dates(len(values), start), values, name)

    def __len__(self) -> int:
        return len(self.values)

    def tail(self, n: int) -> "TimeSeries":
        return TimeSeries(self.dates[-n:], self.values[-n:], self.name)


@dataclass(frozen=True)
class RawSeries:
    """Observations where missing values are encoded as NaN."""

    dates: tuple
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        dates = tuple(self.dates)
        values = _frozen(self.values)
        if len(dates) != len(values):
            raise DimensionMismatch(
                f"{len(dates)} dates but {len(values)} values"
            )
        _check_dates(dates)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)


@dataclass(frozen=True)
class CorrelogramResult:
    lags: np.ndarray
    coefficients: np.ndarray
    confidence_bound: float

    def significant_lags(self) -> list:
        mask = np.abs(self.coefficients) > self.confidence_bound
        return [int(k) for k in self.lags[mask] if k > 0]


def as_values(series) -> np.ndarray:
    if isinstance(series, (TimeSeries, RawSeries)):
        return np.asarray(series.values, dtype=float)
    return np.asarray(series, dtype=float)


def difference_values(x: np.ndarray, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if d < 0:
        raise ValueError("differencing order must be non-negative")
    if len(x) <= d:
        raise InsufficientData(f"need more than {d} observations to difference {d} times")
    return np.diff(x, n=d) if d else x.copy()


def integrate_values(diffs: np.ndarray, pivots: Sequence[float]) -> np.ndarray:
    """Undo ``len(pivots)``-fold differencing.

    ``pivots`` are the undifferenced values immediately preceding the first
    element of ``diffs``.
    """
    cur = np.asarray(diffs, dtype=float)
    pivots = np.asarray(pivots, dtype=float)
    d = len(pivots)
    # level of the k-th difference at the last pivot
    states = [np.diff(pivots, n=k)[-1] for k in range(d)]
    for k in range(d - 1, -1, -1):
        cur = states[k] + np.cumsum(cur)
    return cur


def difference(series: TimeSeries, d: int) -> TimeSeries:
    """d-th order difference; the result keeps the trailing dates."""
    values = difference_values(series.values, d)
    return TimeSeries(series.dates[d:], values, series.name)


def integrate(diffs, pivots: Sequence[float], d: int | None = None):
    if d is None:
        d = len(pivots)
    if len(pivots) != d:
        raise DimensionMismatch(f"expected {d} pivots, got {len(pivots)}")
    values = integrate_values(as_values(diffs), pivots)
    if isinstance(diffs, TimeSeries):
        return TimeSeries(diffs.dates, values, diffs.name)
    return values


def impute_monthly_mean(raw: RawSeries) -> TimeSeries:
    """Replace each missing value with the mean of its calendar month."""
    values = np.array(raw.values, dtype=float)
    missing = np.isnan(values)
    if missing.any():
        months = [(d.year, d.month) for d in raw.dates]
        groups: dict = {}
        for i, key in enumerate(months):
            groups.setdefault(key, []).append(i)
        for key, idx in groups.items():
            idx = np.array(idx)
            gap = missing[idx]
            if not gap.any():
                continue
            observed = values[idx[~gap]]
            if observed.size == 0:
                raise ImputationImpossible(f"{key[0]:04d}-{key[1]:02d}")
            values[idx[gap]] = observed.mean()
    return TimeSeries(raw.dates, values, raw.name)


def _autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = len(x)
    xc = x - x.mean()
    return np.array([xc[: n - k] @ xc[k:] for k in range(max_lag + 1)]) / n


def acf(series, max_lag: int) -> CorrelogramResult:
    x = as_values(series)
    n = len(x)
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    if n <= max_lag:
        raise InsufficientData(f"series of length {n} too short for lag {max_lag}")
    gamma = _autocovariance(x, max_lag)
    if not gamma[0] > 0:
        raise DegenerateSeries("series has zero variance")
    coef = gamma / gamma[0]
    coef[0] = 1.0
    return CorrelogramResult(np.arange(max_lag + 1), coef, 1.96 / np.sqrt(n))


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """Partial autocorrelations at lags 1..len(rho)-1 from autocorrelations."""
    m = len(rho) - 1
    out = np.empty(m)
    phi = np.zeros(0)
    v = 1.0
    for k in range(1, m + 1):
        num = rho[k] - phi @ rho[k - 1 : 0 : -1] if k > 1 else rho[1]
        kk = num / v
        if not abs(kk) < 1.0:
            raise NumericalDegeneracy(f"partial autocorrelation at lag {k} is {kk}")
        phi = np.append(phi - kk * phi[::-1], kk)
        v *= 1.0 - kk * kk
        out[k - 1] = kk
    return out


def pacf(series, max_lag: int) -> CorrelogramResult:
    x = as_values(series)
    if max_lag >= len(x) - 1:
        raise InsufficientData(
            f"series of length {len(x)} too short for PACF lag {max_lag}"
        )
    r = acf(x, max_lag)
    return CorrelogramResult(
        np.arange(1, max_lag + 1), durbin_levinson(r.coefficients), r.confidence_bound
    )
