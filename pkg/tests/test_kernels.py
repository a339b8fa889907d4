import os
import subprocess
import sys

import numpy as np
import pytest

from bjarima import _kernels_py, kernels

cython = pytest.importorskip("bjarima._kernels")


@pytest.fixture
def data():
    rng = np.random.default_rng(7)
    return rng.standard_normal(500), np.array([0.4, -0.2, 0.1]), np.array([0.5, 0.2])


@pytest.mark.parametrize("phi, theta", [((), ()), ((0.5,), ()), ((), (0.5,)), ("full", "full")])
def test_css_backends_agree(data, phi, theta):
    w, full_phi, full_theta = data
    phi = full_phi if phi == "full" else np.array(phi, float)
    theta = full_theta if theta == "full" else np.array(theta, float)
    a = cython.css_residuals(w, phi, theta)
    b = _kernels_py.css_residuals(w, phi, theta)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    assert cython.css_objective(w, phi, theta) == pytest.approx(a @ a, rel=1e-13)


def test_filter_backends_agree(data):
    eps, phi, theta = data
    np.testing.assert_allclose(
        cython.arma_filter(eps, phi, theta), _kernels_py.arma_filter(eps, phi, theta),
        rtol=0, atol=1e-12,
    )


def test_short_series_gives_empty_residuals():
    assert len(kernels.css_residuals([1.0], [0.5, 0.1], [])) == 0


def test_css_hand_recursions():
    assert kernels.css_objective([1, 2, 1], [], []) == 6.0
    assert kernels.css_objective([1, 2, 1], [0.5], []) == 2.25
    assert kernels.css_objective([1, 0], [], [0.5]) == 1.25


def test_env_forces_fallback():
    env = dict(os.environ, BJARIMA_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import bjarima; print(bjarima.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
