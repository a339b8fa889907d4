import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bjarima import ArimaOrder
from bjarima.diagnostics import burn_in, histogram, residual_metrics, simulate_arima
from bjarima.errors import DomainError, InsufficientData
from bjarima.estimation import fit
from bjarima.stattests import norm_cdf


class TestMetrics:
    def test_example(self):
        m = residual_metrics([1.0, -1.0, 3.0, -3.0])
        assert m.me == 0.0
        assert m.mae == 2.0
        assert m.rmse == pytest.approx(math.sqrt(5.0))
        assert not m.degenerate

    def test_all_zero_is_degenerate(self):
        m = residual_metrics(np.zeros(10))
        assert (m.me, m.rmse, m.mae, m.residual_acf1) == (0.0, 0.0, 0.0, 0.0)
        assert m.degenerate

    def test_too_short(self):
        with pytest.raises(InsufficientData):
            residual_metrics([1.0])

    @settings(max_examples=300)
    @given(arrays(float, st.integers(2, 60), elements=st.floats(-1e6, 1e6)))
    def test_rmse_dominates(self, e):
        m = residual_metrics(e)
        slack = 1e-12 * max(1.0, m.rmse)
        assert m.rmse + slack >= m.mae >= 0
        assert m.rmse + slack >= abs(m.me)


class TestHistogram:
    def test_example(self):
        h = histogram([-1.0, 0.0, 1.0], bins=2)
        np.testing.assert_array_equal(h.counts, [1, 2])
        np.testing.assert_allclose(h.bin_edges, [-1, 0, 1])
        assert h.mean_marker == 0.0

    def test_zero_span_is_widened(self):
        h = histogram([2.0, 2.0, 2.0], bins=4)
        assert h.bin_edges[0] == 1.5 and h.bin_edges[-1] == 2.5
        assert h.counts.sum() == 3

    def test_counts_sum(self):
        e = np.random.default_rng(0).normal(size=123)
        assert histogram(e).counts.sum() == 123
        assert len(histogram(e).counts) == 12

    def test_bad_input(self):
        with pytest.raises(InsufficientData):
            histogram([])
        with pytest.raises(ValueError):
            histogram([1.0], bins=0)

    def test_normal_mass(self):
        e = simulate_arima(ArimaOrder(0, 0, 0), n=20_000, seed=4).values
        h = histogram(e, bins=12)
        expect = np.diff([norm_cdf(b) for b in h.bin_edges]) * len(e)
        assert np.max(np.abs(h.counts - expect)) / len(e) < 0.02


class TestSimulate:
    def test_deterministic(self):
        a = simulate_arima(ArimaOrder(1, 1, 1), [0.4], [0.3], n=50, seed=7)
        b = simulate_arima(ArimaOrder(1, 1, 1), [0.4], [0.3], n=50, seed=7)
        np.testing.assert_array_equal(a.values, b.values)
        c = simulate_arima(ArimaOrder(1, 1, 1), [0.4], [0.3], n=50, seed=8)
        assert not np.array_equal(a.values, c.values)

    def test_zero_sigma_gives_mean(self):
        x = simulate_arima(ArimaOrder(2, 0, 1), [0.5, 0.2], [0.4], mean=3.5, sigma=0.0, n=30)
        np.testing.assert_array_equal(x.values, np.full(30, 3.5))

    def test_white_noise_variance(self):
        x = simulate_arima(ArimaOrder(0, 0, 0), sigma=2.0, n=20_000, seed=1).values
        assert 3.8 <= x.var() <= 4.2

    def test_integration_order(self):
        x = simulate_arima(ArimaOrder(0, 2, 0), sigma=0.0, mean=1.0, n=4).values
        np.testing.assert_array_equal(x, [1, 3, 6, 10])

    def test_burn_in(self):
        assert burn_in(ArimaOrder(1, 0, 1)) == 200
        assert burn_in(ArimaOrder(12, 0, 12)) == 240

    @pytest.mark.parametrize("order,phi,theta", [
        ((1, 0, 0), [1.0], []),
        ((1, 0, 0), [-1.2], []),
        ((0, 0, 1), [], [1.5]),
        ((1, 0, 0), [], []),
    ])
    def test_domain(self, order, phi, theta):
        with pytest.raises(DomainError):
            simulate_arima(ArimaOrder(*order), phi, theta, n=10)

    def test_residual_acf_small_for_correct_model(self):
        inside = 0
        for seed in range(50):
            x = simulate_arima(ArimaOrder(1, 0, 0), [0.5], n=300, seed=seed)
            m = fit(x, ArimaOrder(1, 0, 0))
            r1 = residual_metrics(m.residuals).residual_acf1
            inside += abs(r1) <= 2 / math.sqrt(len(m.residuals))
        assert inside >= 45
