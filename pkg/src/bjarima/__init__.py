"""Box-Jenkins ARIMA toolkit for epidemic test-positivity series."""
from .diagnostics import (
    FitMetrics,
    HistogramData,
    histogram,
    residual_metrics,
    simulate_arima,
)
from .errors import *  # noqa: F401,F403
from .estimation import (
    ArimaModel,
    ArimaOrder,
    css_objective,
    fit,
    identify,
    information_criteria,
    select_order,
)
from .forecasting import ForecastResult, forecast, psi_weights
from .kernels import BACKEND
from .pipeline import (
    CountryReport,
    PipelineConfig,
    PolicyAdvice,
    emit_reports,
    ingest_owid_csv,
    policy_recommendation,
    run_pipeline,
)
from .series import (
    CorrelogramResult,
    RawSeries,
    TimeSeries,
    acf,
    difference,
    impute_monthly_mean,
    integrate,
    pacf,
)
from .stattests import (
    AdfResult,
    LjungBoxResult,
    adf_test,
    chi2_sf,
    ljung_box,
    norm_cdf,
    norm_quantile,
)

__version__ = "0.1.0"
