"""Conditional-sum-of-squares ARIMA estimation and order identification."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import ConvergenceFailure, InsufficientData
from .series import acf, as_values, difference_values, pacf
from .stattests import AdfResult, adf_test

MAX_P = 12
MAX_D = 3
MAX_Q = 12

# keeps transformed partial autocorrelations off the unit circle
_PACF_LIMIT = 1.0 - 1e-6
_ROOT_MARGIN = 1e-8


@dataclass(frozen=True)
class ArimaOrder:
    p: int = 0
    d: int = 0
    q: int = 0

    def __post_init__(self):
        for name, val, cap in (("p", self.p, MAX_P), ("d", self.d, MAX_D), ("q", self.q, MAX_Q)):
            if not 0 <= int(val) <= cap:
                raise ValueError(f"order {name}={val} outside [0, {cap}]")

    def __iter__(self):
        return iter((self.p, self.d, self.q))

    def __str__(self):
        return f"({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    phi: np.ndarray
    theta: np.ndarray
    mean: float | None
    sigma2: float
    loglik: float
    aic: float
    bic_paper: float
    bic_standard: float
    n_effective: int
    residuals: np.ndarray
    converged: bool = True
    n_evals: int = 0

    @property
    def include_mean(self) -> bool:
        return self.mean is not None

    @property
    def n_params(self) -> int:
        """Estimated parameter count k, including the innovation variance."""
        return self.order.p + self.order.q + int(self.include_mean) + 1

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def pacf_to_coefficients(r) -> np.ndarray:
    """Map partial autocorrelations in (-1, 1) to stationary AR coefficients."""
    phi = np.zeros(0)
    for rk in np.asarray(r, dtype=float):
        phi = np.append(phi - rk * phi[::-1], rk)
    return phi


def coefficients_to_pacf(phi) -> np.ndarray:
    """Inverse of :func:`pacf_to_coefficients` (step-down recursion)."""
    a = np.array(phi, dtype=float)
    r = np.zeros(len(a))
    for k in range(len(a), 0, -1):
        rk = a[k - 1]
        r[k - 1] = rk
        if k > 1:
            a = (a[: k - 1] + rk * a[k - 2 :: -1]) / (1.0 - rk * rk)
    return r


def constrain(u) -> np.ndarray:
    """Unconstrained reals -> coefficients with all roots outside the unit circle."""
    r = np.clip(np.tanh(np.asarray(u, dtype=float)), -_PACF_LIMIT, _PACF_LIMIT)
    return pacf_to_coefficients(r)


def unconstrain(phi) -> np.ndarray:
    return np.arctanh(coefficients_to_pacf(phi))


def ar_root_moduli(phi) -> np.ndarray:
    """Moduli of the roots of 1 - phi_1 z - ... - phi_p z^p.

    Computed as reciprocals of the companion-matrix eigenvalues, so
    vanishing trailing coefficients give infinite moduli instead of overflow.
    """
    phi = np.asarray(phi, dtype=float)
    p = len(phi)
    if p == 0:
        return np.zeros(0)
    comp = np.zeros((p, p))
    comp[0] = phi
    comp[1:, :-1] = np.eye(p - 1)
    with np.errstate(divide="ignore"):
        return 1.0 / np.abs(np.linalg.eigvals(comp))


def ma_root_moduli(theta) -> np.ndarray:
    return ar_root_moduli(-np.asarray(theta, dtype=float))


def is_stationary(phi, margin: float = _ROOT_MARGIN) -> bool:
    return bool(np.all(ar_root_moduli(phi) > 1.0 + margin))


def is_invertible(theta, margin: float = _ROOT_MARGIN) -> bool:
    return bool(np.all(ma_root_moduli(theta) > 1.0 + margin))


def css_objective(phi, theta, mean, series) -> float:
    """Conditional sum of squares of an ARMA model on an already differenced series.

    Innovations before the first usable observation are zero and the sum
    starts after the first ``len(phi)`` observations.
    """
    w = as_values(series)
    if mean:
        w = w - mean
    return kernels.css_objective(w, np.asarray(phi, float), np.asarray(theta, float))


def criteria(loglik: float, k: int, n: int) -> tuple[float, float, float]:
    """(aic, bic_paper, bic_standard); bic_paper doubles the ln(N)*k penalty."""
    aic = -2.0 * loglik + 2.0 * k
    bic_paper = -2.0 * loglik + 2.0 * math.log(n) * k
    bic_standard = -2.0 * loglik + math.log(n) * k
    return aic, bic_paper, bic_standard


def information_criteria(model: ArimaModel) -> tuple[float, float, float]:
    return criteria(model.loglik, model.n_params, model.n_effective)


def gaussian_loglik(css: float, n: int) -> float:
    sigma2 = css / n
    return -0.5 * n * (math.log(2.0 * math.pi) + math.log(sigma2) + 1.0)


def _build_model(order, phi, theta, mean, w, converged, n_evals) -> ArimaModel:
    centred = w - mean if mean is not None else w
    resid = kernels.css_residuals(centred, phi, theta)
    n_eff = len(resid)
    css = float(resid @ resid)
    if not css > 0:
        # exact fit; keep the likelihood finite
        css = np.finfo(float).tiny * n_eff
    sigma2 = css / n_eff
    loglik = gaussian_loglik(css, n_eff)
    k = order.p + order.q + int(mean is not None) + 1
    aic, bic_p, bic_s = criteria(loglik, k, n_eff)
    resid.setflags(write=False)
    return ArimaModel(
        order=order,
        phi=np.asarray(phi, float),
        theta=np.asarray(theta, float),
        mean=None if mean is None else float(mean),
        sigma2=sigma2,
        loglik=loglik,
        aic=aic,
        bic_paper=bic_p,
        bic_standard=bic_s,
        n_effective=n_eff,
        residuals=resid,
        converged=converged,
        n_evals=n_evals,
    )


def fit(
    series,
    order: ArimaOrder,
    include_mean: bool | None = None,
    max_evals: int | None = None,
    tol: float = 1e-10,
) -> ArimaModel:
    """Fit ARIMA(p,d,q) by conditional least squares.

    AR and MA coefficients are searched in unconstrained coordinates mapped
    through the partial-autocorrelation transform, so every candidate is
    stationary and invertible. The mean is searched as an offset from the
    sample mean in units of the sample standard deviation. Nelder-Mead stops
    when the relative spread of the simplex values drops below ``tol``.

    Raises ConvergenceFailure (with the best model found attached) when the
    evaluation budget of ``2000 * (p + q + 1)`` runs out first.
    """
    if not isinstance(order, ArimaOrder):
        order = ArimaOrder(*order)
    x = as_values(series)
    p, d, q = order
    if len(x) < d + p + q + 10:
        raise InsufficientData(
            f"ARIMA{order} needs at least {d + p + q + 10} observations, got {len(x)}"
        )
    if include_mean is None:
        include_mean = d == 0
    w = difference_values(x, d)
    centre = float(w.mean())
    scale = float(w.std()) or 1.0
    nparam = p + q + int(include_mean)
    if max_evals is None:
        max_evals = 2000 * (p + q + 1)

    def unpack(v):
        phi = constrain(v[:p])
        theta = -constrain(v[p : p + q])
        mean = centre + scale * v[p + q] if include_mean else None
        return phi, theta, mean

    def raw_objective(v):
        phi, theta, mean = unpack(v)
        # the transform bounds each partial autocorrelation, but for p >= 2
        # roots can still approach the unit circle
        if (p > 1 and not is_stationary(phi)) or (q > 1 and not is_invertible(theta)):
            return np.inf
        centred = w - mean if mean is not None else w
        return kernels.css_objective(centred, phi, theta)

    x0 = np.zeros(nparam)
    if nparam == 0:
        return _build_model(order, np.zeros(0), np.zeros(0), None, w, True, 1)

    f0 = raw_objective(x0)
    norm = f0 if f0 > 0 else 1.0
    simplex = np.vstack([x0, 0.5 * np.eye(nparam)])
    if include_mean:
        simplex[-1, -1] = 0.1
    res = minimize(
        lambda v: raw_objective(v) / norm,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": np.inf,
            "fatol": tol,
            "maxfev": max_evals,
            "maxiter": 10 * max_evals,
            "adaptive": nparam > 3,
        },
    )
    best = res.x if res.fun * norm <= f0 else x0
    phi, theta, mean = unpack(best)
    model = _build_model(order, phi, theta, mean, w, bool(res.success), int(res.nfev))
    if not res.success:
        raise ConvergenceFailure(
            f"ARIMA{order} did not converge in {res.nfev} evaluations: {res.message}",
            model=model,
        )
    return model


def fit_best_effort(series, order, include_mean=None) -> ArimaModel:
    """Like :func:`fit` but returns the best-so-far model on non-convergence."""
    try:
        return fit(series, order, include_mean)
    except ConvergenceFailure as exc:
        return exc.model


@dataclass(frozen=True)
class Identification:
    order: ArimaOrder
    adf_levels: tuple  # AdfResult for each differencing level tried
    d_capped: bool
    pacf_significant: list = field(default_factory=list)
    acf_significant: list = field(default_factory=list)

    @property
    def adf(self) -> AdfResult:
        return self.adf_levels[0]


def _largest_significant(corr, cap: int) -> int:
    lags = [k for k in corr.significant_lags() if k <= cap]
    return max(lags) if lags else 0


def identify(series, caps: ArimaOrder = ArimaOrder(MAX_P, MAX_D, MAX_Q)) -> Identification:
    """Box-Jenkins identification: d from repeated ADF, p from PACF, q from ACF."""
    x = as_values(series)
    tried = []
    d_capped = True
    for d in range(caps.d + 1):
        res = adf_test(difference_values(x, d))
        tried.append(res)
        if res.stationary:
            d_capped = False
            break
    if d_capped:
        warnings.warn(
            f"series not stationary after {caps.d} differences; using d={caps.d}",
            stacklevel=2,
        )
    w = difference_values(x, d)
    max_lag = max(1, min(max(caps.p, caps.q), len(w) - 2))
    pc = pacf(w, max_lag)
    ac = acf(w, max_lag)
    order = ArimaOrder(
        _largest_significant(pc, caps.p), d, _largest_significant(ac, caps.q)
    )
    return Identification(
        order, tuple(tried), d_capped, pc.significant_lags(), ac.significant_lags()
    )


def select_order(
    series, caps: ArimaOrder = ArimaOrder(MAX_P, MAX_D, MAX_Q), refine: bool = False
) -> ArimaOrder:
    """Pick (p, d, q) from unit-root tests and correlogram cutoffs.

    With ``refine`` the +-1 neighbourhood of (p, q) is fitted and the
    minimum-AIC order is returned.
    """
    order = identify(series, caps).order
    if not refine:
        return order
    x = as_values(series)
    best, best_aic = order, math.inf
    for p in range(max(order.p - 1, 0), min(order.p + 1, caps.p) + 1):
        for q in range(max(order.q - 1, 0), min(order.q + 1, caps.q) + 1):
            cand = ArimaOrder(p, order.d, q)
            try:
                aic = fit_best_effort(x, cand).aic
            except InsufficientData:
                continue
            if aic < best_aic:
                best, best_aic = cand, aic
    return best
