"""Unit-root and portmanteau tests plus the special functions behind them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InsufficientData,
    InvalidDof,
    NumericalDegeneracy,
)
from .series import acf, as_values

_EPS = 1e-16
_TINY = 1e-300


def _gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = total = 1.0 / a
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def chi2_sf(x: float, dof: int) -> float:
    """Survival function P(X > x) of a chi-squared variable with ``dof`` dof."""
    if dof <= 0:
        raise InvalidDof(f"degrees of freedom must be positive, got {dof}")
    if x < 0:
        raise DomainError("chi2_sf needs x >= 0")
    return gammaincc(0.5 * dof, 0.5 * x)


def norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def norm_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


# Acklam's rational approximation to the normal quantile
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def _acklam(p: float) -> float:
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def norm_quantile(p: float) -> float:
    """Standard normal quantile, polished with Newton steps."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"norm_quantile needs 0 < p < 1, got {p}")
    if p > 0.5:
        return -norm_quantile(1.0 - p)
    if p == 0.5:
        return 0.0
    z = _acklam(p)
    for _ in range(2):
        z -= (norm_cdf(z) - p) / norm_pdf(z)
    return z


@dataclass(frozen=True)
class LjungBoxResult:
    statistic: float
    dof: int
    p_value: float
    lags_used: int
    fitdf: int


def ljung_box(residuals, lags_used: int = 20, fitdf: int = 0) -> LjungBoxResult:
    e = as_values(residuals)
    n = len(e)
    if fitdf < 0 or lags_used <= fitdf:
        raise InvalidDof(f"lags_used={lags_used} must exceed fitdf={fitdf}")
    if n <= lags_used:
        raise InsufficientData(f"{n} residuals cannot support {lags_used} lags")
    rho = acf(e, lags_used).coefficients[1:]
    k = np.arange(1, lags_used + 1)
    q = float(n * (n + 2) * np.sum(rho**2 / (n - k)))
    dof = lags_used - fitdf
    return LjungBoxResult(q, dof, chi2_sf(q, dof), lags_used, fitdf)


# Finite-sample Dickey-Fuller quantiles of the t-ratio, constant-only
# regression (Fuller 1976). Rows: sample sizes; columns: _ADF_LEVELS.
_ADF_SIZES = np.array([25, 50, 100, 250, 500, np.inf])
_ADF_LEVELS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_TABLE = np.array([
    [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
    [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
    [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
    [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
    [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
    [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
])


def adf_critical_values(n: int) -> np.ndarray:
    """Table row for sample size ``n``, linear in 1/n between tabulated sizes."""
    inv = 1.0 / _ADF_SIZES
    x = 1.0 / n
    # np.interp needs ascending abscissae
    return np.array([np.interp(x, inv[::-1], col[::-1]) for col in _ADF_TABLE.T])


def adf_pvalue(statistic: float, n: int) -> tuple[float, bool]:
    """Interpolated p-value and whether it was clamped to the table range."""
    row = adf_critical_values(n)
    clamped = statistic < row[0] or statistic > row[-1]
    return float(np.interp(statistic, row, _ADF_LEVELS)), bool(clamped)


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    lag_order: int
    n_used: int
    regression_kind: str = "constant"
    clamped: bool = False

    @property
    def stationary(self) -> bool:
        # boundary p == 0.05 counts as failing to reject
        return self.p_value < 0.05


def default_adf_lag(n: int) -> int:
    return int(math.floor((n - 1) ** (1.0 / 3.0)))


def adf_test(series, lag_order: int | None = None) -> AdfResult:
    """Augmented Dickey-Fuller test with a constant and no trend.

    Regresses the first difference on a constant, the lagged level and
    ``lag_order`` lagged differences; the statistic is the t-ratio of the
    lagged level coefficient.
    """
    x = as_values(series)
    n = len(x)
    if lag_order is None:
        lag_order = default_adf_lag(max(n, 1))
    if lag_order < 0:
        raise ValueError("lag_order must be non-negative")
    if n < lag_order + 10:
        raise InsufficientData(f"ADF with {lag_order} lags needs >= {lag_order + 10} points, got {n}")
    # location/scale standardisation leaves the t-ratio unchanged and keeps
    # the design well conditioned
    spread = x.std()
    if not spread > 0:
        raise NumericalDegeneracy("constant series; ADF regression is singular")
    x = (x - x.mean()) / spread
    dx = np.diff(x)
    rows = np.arange(lag_order, n - 1)
    n_used = len(rows)
    cols = [np.ones(n_used), x[rows]]
    cols += [dx[rows - i] for i in range(1, lag_order + 1)]
    X = np.column_stack(cols)
    y = dx[rows]
    dof = n_used - X.shape[1]
    if dof < 1:
        raise InsufficientData("no residual degrees of freedom in ADF regression")
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * diag.max():
        raise NumericalDegeneracy("ADF regression matrix is singular")
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    s2 = resid @ resid / dof
    if not s2 > 0:
        raise NumericalDegeneracy("ADF regression fits exactly; t-ratio undefined")
    rinv = np.linalg.solve(R, np.eye(R.shape[0]))
    se = math.sqrt(s2 * (rinv[1] @ rinv[1]))
    stat = float(beta[1] / se)
    p, clamped = adf_pvalue(stat, n_used)
    return AdfResult(stat, p, lag_order, n_used, "constant", clamped)
