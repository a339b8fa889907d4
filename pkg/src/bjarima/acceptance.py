"""Monte Carlo and oracle acceptance checks, one method per criterion.

Used by ``bjarima selftest`` and by ``tests/test_acceptance.py``.
"""
from __future__ import annotations

import filecmp
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import residual_metrics, simulate_arima
from .estimation import ArimaOrder, ar_root_moduli, criteria, fit, ma_root_moduli
from .forecasting import forecast, psi_coefficients
from .series import difference_values, integrate_values
from .stattests import adf_test, chi2_sf, ljung_box, norm_cdf, norm_quantile


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f} s)"


def ks_uniform_distance(sample) -> float:
    u = np.sort(np.asarray(sample, dtype=float))
    n = len(u)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def _min_root(model) -> float:
    roots = np.concatenate((ar_root_moduli(model.phi), ma_root_moduli(model.theta)))
    return float(roots.min()) if roots.size else math.inf


class AcceptanceSuite:
    """Runs the numbered criteria; fitted models feed the root check (12)."""

    def __init__(self):
        self._cache: dict = {}
        self.root_minima: dict = {}

    def _timed(self, number, name, fn) -> CheckResult:
        if number in self._cache:
            return self._cache[number]
        t0 = time.perf_counter()
        passed, detail, limit = fn()
        secs = time.perf_counter() - t0
        if limit is not None and secs >= limit:
            passed = False
            detail += f"; runtime {secs:.1f} s exceeds {limit} s"
        res = CheckResult(number, name, bool(passed), detail, secs)
        self._cache[number] = res
        return res

    def c01_round_trip(self) -> CheckResult:
        def run():
            rng = np.random.default_rng(1)
            worst = 0.0
            for _ in range(100):
                x = rng.normal(0, 10, rng.integers(20, 200))
                for d in range(4):
                    back = integrate_values(difference_values(x, d), x[:d])
                    worst = max(worst, float(np.max(np.abs(back - x[d:]))))
            return worst < 1e-9, f"max abs error {worst:.2e} (< 1e-9)", 1.0

        return self._timed(1, "integrate/difference round trip", run)

    def c02_estimator_recovery(self) -> CheckResult:
        def run():
            out = []
            ok = True
            for label, order, true in (("AR(1) phi", (1, 0, 0), 0.7), ("MA(1) theta", (0, 0, 1), 0.5)):
                errs = []
                for seed in range(100):
                    phi = [true] if order[0] else []
                    theta = [true] if order[2] else []
                    x = simulate_arima(ArimaOrder(*order), phi, theta, 0.0, 1.0, 1000, seed)
                    m = fit(x, ArimaOrder(*order))
                    est = m.phi[0] if order[0] else m.theta[0]
                    errs.append(abs(est - true))
                    self.root_minima[("c02", label, seed)] = _min_root(m)
                errs = np.array(errs)
                ok &= errs.mean() < 0.05 and errs.max() <= 0.15
                out.append(f"{label} mean|err| {errs.mean():.4f} max {errs.max():.4f}")
            return ok, "; ".join(out), 60.0

        return self._timed(2, "estimator recovery", run)

    def c03_adf_calibration(self) -> CheckResult:
        def run():
            size = power = 0
            for seed in range(500):
                rw = simulate_arima(ArimaOrder(0, 1, 0), n=200, seed=seed)
                size += adf_test(rw).p_value < 0.05
                ar = simulate_arima(ArimaOrder(1, 0, 0), [0.5], n=200, seed=seed)
                power += adf_test(ar).p_value < 0.05
            size, power = size / 500, power / 500
            ok = 0.02 <= size <= 0.09 and power >= 0.95
            return ok, f"size {size:.3f} in [0.02, 0.09]; power {power:.3f} >= 0.95", 60.0

        return self._timed(3, "ADF calibration", run)

    def c04_ljung_box_uniformity(self) -> CheckResult:
        def run():
            pvals = []
            for seed in range(1000):
                e = simulate_arima(ArimaOrder(0, 0, 0), n=200, seed=seed).values
                pvals.append(ljung_box(e, 10, 0).p_value)
            ks = ks_uniform_distance(pvals)
            return ks < 0.08, f"KS distance {ks:.4f} (< 0.08)", 30.0

        return self._timed(4, "Ljung-Box null uniformity", run)

    def c05_interval_calibration(self) -> CheckResult:
        def run():
            hits = 0
            trials = 2000
            for seed in range(trials):
                x = simulate_arima(ArimaOrder(1, 0, 0), [0.6], n=201, seed=seed).values
                m = fit(x[:-1], ArimaOrder(1, 0, 0))
                fc = forecast(m, x[:-1], 1, 0.80)
                hits += fc.lower[0] <= x[-1] <= fc.upper[0]
                self.root_minima[("c05", seed)] = _min_root(m)
            cov = hits / trials
            return 0.76 <= cov <= 0.84, f"coverage {cov:.4f} in [0.76, 0.84]", 300.0

        return self._timed(5, "80% interval calibration", run)

    def c06_random_walk_forecast(self) -> CheckResult:
        def run():
            x = simulate_arima(ArimaOrder(0, 1, 0), n=150, seed=11)
            m = fit(x, ArimaOrder(0, 1, 0))
            fc = forecast(m, x, 30, 0.80)
            flat = bool(np.all(fc.point == x.values[-1]))
            expect = norm_quantile(0.9) * m.sigma * np.sqrt(np.arange(1, 31))
            err = float(np.max(np.abs(fc.half_width - expect)))
            return flat and err < 1e-9, f"flat={flat}; half-width error {err:.2e}", None

        return self._timed(6, "random-walk forecast", run)

    def c07_special_functions(self) -> CheckResult:
        def run():
            e1 = abs(chi2_sf(2.0, 2) - math.exp(-1.0))
            rt = max(abs(norm_cdf(norm_quantile(k / 100)) - k / 100) for k in range(1, 100))
            return e1 <= 1e-12 and rt <= 1e-8, f"chi2 err {e1:.1e}; quantile round trip {rt:.1e}", None

        return self._timed(7, "special functions", run)

    def c08_information_criteria(self) -> CheckResult:
        def run():
            aic, _, _ = criteria(-10.0, 3, 100)
            _, bic_paper, _ = criteria(-10.0, 3, math.exp(2.0))
            _, _, bic_std = criteria(-10.0, 3, 100)
            errs = [abs(aic - 26.0), abs(bic_paper - 32.0), abs(bic_std - (20.0 + 3 * math.log(100)))]
            ok = max(errs) < 1e-9 and abs(bic_std - 33.8155) < 1e-4
            mono = all(
                criteria(-10.0, k + 1, 50)[i] > criteria(-10.0, k, 50)[i]
                for k in range(1, 30) for i in range(3)
            )
            return ok and mono, f"max arithmetic error {max(errs):.1e}; monotone in k={mono}", None

        return self._timed(8, "information criteria", run)

    def c09_metric_inequality(self) -> CheckResult:
        def run():
            rng = np.random.default_rng(9)
            bad = 0
            for _ in range(1000):
                e = rng.standard_t(3, rng.integers(2, 300)) * rng.uniform(0.01, 10)
                m = residual_metrics(e)
                bad += not (m.rmse >= m.mae >= 0 and m.rmse >= abs(m.me))
            return bad == 0, f"{bad} violations in 1000 vectors", None

        return self._timed(9, "rmse >= mae", run)

    def c10_psi_weights(self) -> CheckResult:
        def run():
            ar = psi_coefficients([0.5], [], 0, 50)
            e1 = float(np.max(np.abs(ar - 0.5 ** np.arange(50))))
            arma = psi_coefficients([0.5], [0.3], 0, 4)
            e2 = float(np.max(np.abs(arma - [1.0, 0.8, 0.4, 0.2])))
            return max(e1, e2) <= 1e-12, f"AR(1) err {e1:.1e}; ARMA(1,1) err {e2:.1e}", None

        return self._timed(10, "psi weights", run)

    def c11_end_to_end(self) -> CheckResult:
        from . import pipeline
        from .cli import main

        def run():
            with tempfile.TemporaryDirectory() as tmp:
                a, b = Path(tmp, "a"), Path(tmp, "b")
                t0 = time.perf_counter()
                code = main(["run", "--output-dir", str(a)])
                elapsed = time.perf_counter() - t0
                main(["run", "--output-dir", str(b)])
                names = sorted(p.name for p in a.iterdir())
                tags = [pipeline.safe_name(c) for c in pipeline.STUDY_COUNTRIES]
                expected = sorted(
                    ["table1.csv", "table2.csv", "report.json", "policy.csv"]
                    + [f"{k}_{t}.csv" for t in tags for k in ("forecast", "residuals", "histogram", "acf")]
                )
                manifest = names == expected
                headers = {
                    "table1.csv": pipeline.TABLE1_HEADER,
                    "table2.csv": pipeline.TABLE2_HEADER,
                    "policy.csv": pipeline.POLICY_HEADER,
                    f"forecast_{tags[0]}.csv": pipeline.FORECAST_HEADER,
                    f"residuals_{tags[0]}.csv": pipeline.RESIDUALS_HEADER,
                    f"histogram_{tags[0]}.csv": pipeline.HISTOGRAM_HEADER,
                    f"acf_{tags[0]}.csv": pipeline.ACF_HEADER,
                }
                header_ok = all(
                    (a / f).read_bytes().split(b"\n", 1)[0] == ",".join(h).encode()
                    for f, h in headers.items()
                )
                _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
                deterministic = not mismatch and not errors
                reports = {r.country: r for r in pipeline.load_reports(a / "report.json")}
                mex = reports["Mexico"].policy
                policy_ok = (
                    mex.verdict == "tighten"
                    and abs(mex.required_test_multiplier - 10.0) < 1e-9
                    and np.allclose(reports["Mexico"].forecast["point"], 50.0, rtol=0, atol=1e-9)
                )
            ok = code == 0 and manifest and header_ok and deterministic and policy_ok and elapsed < 30
            detail = (
                f"exit {code}; {len(names)} files manifest={manifest}; headers={header_ok}; "
                f"byte-deterministic={deterministic}; Mexico {mex.verdict} x{mex.required_test_multiplier:.4f}; "
                f"run {elapsed:.1f} s (< 30 s)"
            )
            return ok, detail, None

        return self._timed(11, "end-to-end pipeline", run)

    def c12_roots(self) -> CheckResult:
        def run():
            self.c02_estimator_recovery()
            self.c05_interval_calibration()
            vals = np.array(list(self.root_minima.values()))
            vals = vals[np.isfinite(vals)]
            bad = int(np.sum(vals <= 1.0 + 1e-8))
            return bad == 0, f"{bad} of {len(vals)} fitted models with a root modulus <= 1 + 1e-8 (min {vals.min():.4f})", None

        return self._timed(12, "stationarity/invertibility of fits", run)

    CHECKS = (
        "c01_round_trip", "c02_estimator_recovery", "c03_adf_calibration",
        "c04_ljung_box_uniformity", "c05_interval_calibration", "c06_random_walk_forecast",
        "c07_special_functions", "c08_information_criteria", "c09_metric_inequality",
        "c10_psi_weights", "c11_end_to_end", "c12_roots",
    )

    def run_all(self, only=None) -> list:
        results = []
        for i, name in enumerate(self.CHECKS, start=1):
            if only and i not in only:
                continue
            results.append(getattr(self, name)())
        return results
