import datetime as dt

import numpy as np
import pytest

from bjarima import ArimaModel, ArimaOrder, TimeSeries


def make_model(phi=(), theta=(), d=0, mean=None, sigma2=1.0, residuals=()):
    """Hand-built model for forecasting tests (no estimation involved)."""
    order = ArimaOrder(len(phi), d, len(theta))
    return ArimaModel(
        order=order,
        phi=np.asarray(phi, float),
        theta=np.asarray(theta, float),
        mean=mean,
        sigma2=sigma2,
        loglik=0.0,
        aic=0.0,
        bic_paper=0.0,
        bic_standard=0.0,
        n_effective=len(residuals),
        residuals=np.asarray(residuals, float),
    )


@pytest.fixture
def april_may():
    return [dt.date(2020, 4, 29), dt.date(2020, 4, 30),
            dt.date(2020, 5, 1), dt.date(2020, 5, 2), dt.date(2020, 5, 3)]


@pytest.fixture
def series_of():
    return lambda values: TimeSeries.from_values(values)
