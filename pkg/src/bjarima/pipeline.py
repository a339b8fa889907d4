"""End-to-end positivity pipeline: OWID CSV in, per-country reports out."""
from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import re
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .diagnostics import DEFAULT_BINS, FitMetrics, histogram, residual_metrics
from .errors import (
    ArimaError,
    DomainError,
    EmptyRange,
    ReportIOError,
    SchemaError,
    UnknownCountry,
)
from .estimation import MAX_P, MAX_Q, ArimaOrder, fit_best_effort, identify
from .forecasting import ForecastResult, forecast
from .series import RawSeries, TimeSeries, acf, impute_monthly_mean
from .stattests import AdfResult, LjungBoxResult, adf_test, ljung_box

log = logging.getLogger(__name__)

BUNDLED_FIXTURE = Path(__file__).parent / "data" / "owid_synthetic.csv"
STUDY_COUNTRIES = ("United States", "Russia", "South Africa", "India", "Mexico", "Spain")
REQUIRED_COLUMNS = ("date", "location", "positive_rate")

TABLE1_HEADER = ["Country", "P_ADF", "p", "d", "q", "AIC", "BIC", "BoxLjung_p"]
TABLE2_HEADER = ["Country", "ME", "RMSE", "MAE", "ACF1"]
FORECAST_HEADER = ["date", "point", "lower", "upper"]
RESIDUALS_HEADER = ["date", "residual"]
HISTOGRAM_HEADER = ["bin_left", "bin_right", "count"]
ACF_HEADER = ["lag", "acf", "bound"]
POLICY_HEADER = ["Country", "verdict", "multiplier"]

# testing increases stated in the source narrative; informational only
LITERATURE_TEST_INCREASE = {
    "India": "20-30%",
    "Mexico": "60-70%",
    "Spain": "30-40%",
}


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def ingest_owid_csv(path, country: str, date_start=None, date_end=None) -> RawSeries:
    """Read one country's positive rate (in percent) from an OWID-schema CSV.

    Fractions are detected by a maximum observed value of at most 1.0 and
    scaled by 100. Empty cells become NaN.
    """
    start = _parse_date(date_start) if isinstance(date_start, str) else date_start
    end = _parse_date(date_end) if isinstance(date_end, str) else date_end
    seen = False
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {', '.join(missing)}")
        for rec in reader:
            if rec["location"] != country:
                continue
            seen = True
            day = _parse_date(rec["date"])
            if (start and day < start) or (end and day > end):
                continue
            cell = (rec["positive_rate"] or "").strip()
            rows.append((day, float(cell) if cell else np.nan))
    if not seen:
        raise UnknownCountry(country)
    if not rows:
        raise EmptyRange(f"{country}: no rows between {start} and {end}")
    rows.sort()
    dates = [r[0] for r in rows]
    values = np.array([r[1] for r in rows])
    observed = values[~np.isnan(values)]
    if observed.size and observed.max() <= 1.0:
        values = values * 100.0
    return RawSeries(dates, values, country)


@dataclass(frozen=True)
class PolicyAdvice:
    verdict: str  # relax | maintain | tighten
    days_below_threshold: int
    required_test_multiplier: float
    trend: str  # rising | falling | flat


def _trend(points: np.ndarray) -> str:
    delta = points[-1] - points[0]
    tol = 1e-9 * max(1.0, abs(points[0]))
    if delta > tol:
        return "rising"
    if delta < -tol:
        return "falling"
    return "flat"


def policy_recommendation(
    result: ForecastResult, threshold: float = 5.0, window: int = 14
) -> PolicyAdvice:
    """Relax / maintain / tighten advice from forecast positive rates.

    A day passes when its forecast is at or below ``threshold``. Relaxing
    needs all of the first ``window`` days to pass. A terminal forecast above
    the threshold that is not falling calls for tightening. The test
    multiplier assumes a constant count of positives, so scaling tests by m
    divides the rate by m.
    """
    if threshold <= 0:
        raise DomainError("threshold must be positive")
    if window < 1 or len(result.point) < window:
        raise DomainError(
            f"forecast horizon {len(result.point)} shorter than window {window}"
        )
    passing = result.point[:window] <= threshold
    run = 0
    for ok in passing[::-1]:
        if not ok:
            break
        run += 1
    terminal = float(result.point[-1])
    trend = _trend(result.point)
    if run == window:
        verdict = "relax"
    elif terminal > threshold and trend != "falling":
        verdict = "tighten"
    else:
        verdict = "maintain"
    return PolicyAdvice(verdict, run, max(1.0, terminal / threshold), trend)


@dataclass
class PipelineConfig:
    input_path: str = str(BUNDLED_FIXTURE)
    countries: Sequence[str] = STUDY_COUNTRIES
    date_start: dt.date = dt.date(2020, 4, 1)
    date_end: dt.date = dt.date(2020, 9, 12)
    horizon: int = 30
    level: float = 0.80
    threshold: float = 5.0
    window: int = 14
    order_mode: object = "auto"  # "auto" or a (p, d, q) triple
    bic_variant: str = "paper"
    output_dir: str = "bjarima-out"
    caps: tuple = (MAX_P, 2, MAX_Q)
    ljung_box_lags: int = 20
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        for name in ("date_start", "date_end"):
            val = getattr(self, name)
            if isinstance(val, str):
                setattr(self, name, _parse_date(val))
        if isinstance(self.countries, str):
            self.countries = [c.strip() for c in self.countries.split(",") if c.strip()]
        self.countries = tuple(self.countries)
        if isinstance(self.order_mode, str) and self.order_mode != "auto":
            self.order_mode = tuple(int(v) for v in self.order_mode.split(","))
        if isinstance(self.order_mode, list):
            self.order_mode = tuple(self.order_mode)
        self.caps = tuple(self.caps)
        self.validate()

    def validate(self):
        if not self.date_start < self.date_end:
            raise DomainError("date_start must precede date_end")
        if not 0 < self.level < 1:
            raise DomainError("level must lie in (0, 1)")
        if not self.threshold > 0:
            raise DomainError("threshold must be positive")
        if self.horizon < 1 or self.window < 1:
            raise DomainError("horizon and window must be positive")
        if self.bic_variant not in ("paper", "standard"):
            raise DomainError("bic_variant must be 'paper' or 'standard'")
        if self.order_mode != "auto":
            ArimaOrder(*self.order_mode)

    @classmethod
    def from_file(cls, path, **overrides) -> "PipelineConfig":
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass(frozen=True)
class ModelSummary:
    phi: list
    theta: list
    mean: float | None
    sigma2: float
    loglik: float
    aic: float
    bic_paper: float
    bic_standard: float
    n_effective: int
    converged: bool


@dataclass
class CountryReport:
    country: str
    adf: AdfResult | None = None
    order: ArimaOrder | None = None
    order_warning: str | None = None
    model: ModelSummary | None = None
    ljung_box: LjungBoxResult | None = None
    metrics: FitMetrics | None = None
    forecast: dict | None = None  # dates/point/lower/upper/level/origin_date
    policy: PolicyAdvice | None = None
    residual_dates: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    residual_acf: list = field(default_factory=list)
    acf_bound: float | None = None
    histogram: dict | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.order is not None:
            out["order"] = {"p": self.order.p, "d": self.order.d, "q": self.order.q}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CountryReport":
        data = dict(data)
        for key, typ in (
            ("adf", AdfResult),
            ("order", ArimaOrder),
            ("model", ModelSummary),
            ("ljung_box", LjungBoxResult),
            ("metrics", FitMetrics),
            ("policy", PolicyAdvice),
        ):
            if data.get(key) is not None:
                data[key] = typ(**data[key])
        return cls(**data)


def _forecast_dict(fc: ForecastResult) -> dict:
    return {
        "dates": [d.isoformat() for d in fc.dates],
        "point": [float(v) for v in fc.point],
        "lower": [float(v) for v in fc.lower],
        "upper": [float(v) for v in fc.upper],
        "level": float(fc.level),
        "origin_date": fc.origin_date.isoformat() if fc.origin_date else None,
    }


def build_country_report(series: TimeSeries, config: PipelineConfig) -> CountryReport:
    """Run every modelling step for one imputed series."""
    rep = CountryReport(series.name)
    rep.adf = adf_test(series)
    if config.order_mode == "auto":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            ident = identify(series, ArimaOrder(*config.caps))
        rep.order = ident.order
        if caught:
            rep.order_warning = str(caught[-1].message)
    else:
        rep.order = ArimaOrder(*config.order_mode)
    model = fit_best_effort(series, rep.order)
    rep.model = ModelSummary(
        phi=[float(v) for v in model.phi],
        theta=[float(v) for v in model.theta],
        mean=model.mean,
        sigma2=model.sigma2,
        loglik=model.loglik,
        aic=model.aic,
        bic_paper=model.bic_paper,
        bic_standard=model.bic_standard,
        n_effective=model.n_effective,
        converged=model.converged,
    )
    resid = np.asarray(model.residuals)
    fitdf = rep.order.p + rep.order.q
    lags = min(config.ljung_box_lags, len(resid) - 1)
    rep.ljung_box = ljung_box(resid, max(lags, fitdf + 1), fitdf)
    rep.metrics = residual_metrics(resid)
    rep.residual_dates = [d.isoformat() for d in series.dates[-len(resid):]]
    rep.residuals = [float(v) for v in resid]
    if not rep.metrics.degenerate:
        corr = acf(resid, min(config.ljung_box_lags, len(resid) - 1))
        rep.residual_acf = [float(v) for v in corr.coefficients]
        rep.acf_bound = float(corr.confidence_bound)
    hist = histogram(resid, config.bins)
    rep.histogram = {
        "bin_edges": [float(v) for v in hist.bin_edges],
        "counts": [int(v) for v in hist.counts],
        "mean_marker": hist.mean_marker,
    }
    fc = forecast(model, series, config.horizon, config.level)
    rep.forecast = _forecast_dict(fc)
    rep.policy = policy_recommendation(fc, config.threshold, config.window)
    return rep


def run_country(config: PipelineConfig, country: str) -> CountryReport:
    try:
        raw = ingest_owid_csv(config.input_path, country, config.date_start, config.date_end)
        series = impute_monthly_mean(raw)
        return build_country_report(series, config)
    except (ArimaError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.warning("%s failed: %s", country, exc)
        return CountryReport(country, error=f"{type(exc).__name__}: {exc}")


def run_pipeline(config: PipelineConfig, emit: bool = True) -> list:
    if not Path(config.input_path).is_file():
        raise FileNotFoundError(config.input_path)
    reports = [run_country(config, c) for c in config.countries]
    if emit:
        emit_reports(reports, config.output_dir, config)
    return reports


def safe_name(country: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", country).strip("_")


def _fmt(v) -> str:
    return f"{v:.4f}"


def _write_csv(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or str(exc)) from exc


def emit_reports(reports, output_dir, config: PipelineConfig | None = None) -> list:
    """Write the Table-1/Table-2 CSVs, per-country plot data, policy.csv and report.json.

    Returns the written paths. Failed countries appear only in report.json.
    """
    config = config or PipelineConfig()
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportIOError(out, exc.strerror or str(exc)) from exc
    good = [r for r in reports if r.ok]
    written = []

    def bic(r):
        return r.model.bic_paper if config.bic_variant == "paper" else r.model.bic_standard

    path = out / "table1.csv"
    _write_csv(path, TABLE1_HEADER, [
        [r.country, _fmt(r.adf.p_value), r.order.p, r.order.d, r.order.q,
         _fmt(r.model.aic), _fmt(bic(r)), _fmt(r.ljung_box.p_value)]
        for r in good
    ])
    written.append(path)
    path = out / "table2.csv"
    _write_csv(path, TABLE2_HEADER, [
        [r.country, _fmt(r.metrics.me), _fmt(r.metrics.rmse), _fmt(r.metrics.mae),
         _fmt(r.metrics.residual_acf1)]
        for r in good
    ])
    written.append(path)
    for r in good:
        tag = safe_name(r.country)
        fc = r.forecast
        path = out / f"forecast_{tag}.csv"
        _write_csv(path, FORECAST_HEADER, [
            [d, _fmt(a), _fmt(b), _fmt(c)]
            for d, a, b, c in zip(fc["dates"], fc["point"], fc["lower"], fc["upper"])
        ])
        written.append(path)
        path = out / f"residuals_{tag}.csv"
        _write_csv(path, RESIDUALS_HEADER,
                   [[d, _fmt(v)] for d, v in zip(r.residual_dates, r.residuals)])
        written.append(path)
        edges, counts = r.histogram["bin_edges"], r.histogram["counts"]
        path = out / f"histogram_{tag}.csv"
        _write_csv(path, HISTOGRAM_HEADER,
                   [[_fmt(edges[i]), _fmt(edges[i + 1]), c] for i, c in enumerate(counts)])
        written.append(path)
        path = out / f"acf_{tag}.csv"
        _write_csv(path, ACF_HEADER, [
            [k, _fmt(v), _fmt(r.acf_bound)] for k, v in enumerate(r.residual_acf)
        ])
        written.append(path)
    path = out / "policy.csv"
    _write_csv(path, POLICY_HEADER, [
        [r.country, r.policy.verdict, _fmt(r.policy.required_test_multiplier)] for r in good
    ])
    written.append(path)

    payload = {
        "config": {
            "countries": list(config.countries),
            "date_start": config.date_start.isoformat(),
            "date_end": config.date_end.isoformat(),
            "horizon": config.horizon,
            "level": config.level,
            "threshold": config.threshold,
            "window": config.window,
            "order_mode": config.order_mode if config.order_mode == "auto" else list(config.order_mode),
            "bic_variant": config.bic_variant,
        },
        "reports": [r.to_dict() for r in reports],
        "failures": [{"country": r.country, "error": r.error} for r in reports if not r.ok],
        "literature_test_increase": LITERATURE_TEST_INCREASE,
    }
    path = out / "report.json"
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or str(exc)) from exc
    written.append(path)
    return written


def load_reports(path) -> list:
    with open(path) as fh:
        payload = json.load(fh)
    return [CountryReport.from_dict(d) for d in payload["reports"]]
