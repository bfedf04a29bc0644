import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modlab.stable import StableDomainError, StableLaw, density_at_zero_series, scaling_defect


def test_levy_closed_form():
    law = StableLaw.levy()
    assert law.density(1.0) == pytest.approx(0.24197072451914337, rel=1e-9)
    x = np.array([0.5, 2.0, 5.0])
    closed = np.exp(-1 / (2 * x)) / np.sqrt(2 * np.pi * x**3)
    np.testing.assert_allclose(law.density(x), closed, rtol=1e-8)


def test_gaussian_cdf():
    from scipy.stats import norm
    x = np.array([-2.0, 0.0, 0.7])
    np.testing.assert_allclose(StableLaw.gaussian().cdf(x), norm.cdf(x), atol=1e-9)


def test_parameter_checks():
    with pytest.raises(ValueError):
        StableLaw(1.0, 2.5, 0.0)
    with pytest.raises(ValueError):
        StableLaw(-1.0, 1.5, 0.0)
    with pytest.raises(ValueError):
        StableLaw(1.0, 1.5, 1.2)


def test_series_domain():
    with pytest.raises(StableDomainError):
        density_at_zero_series(StableLaw(1.0, 1.0, 0.5))
    with pytest.raises(StableDomainError):
        density_at_zero_series(StableLaw(1.0, 0.8, 1.0))


def test_equality_ignores_tolerances():
    assert StableLaw(1.0, 1.5, 0.2) == StableLaw(1.0, 1.5, 0.2, quad_tol=1e-8)


def test_charfn_modulus():
    law = StableLaw(0.7, 1.3, -0.4)
    xi = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(np.abs(law.charfn(xi)), np.exp(-np.abs(0.7 * xi) ** 1.3))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(-1, 1), st.floats(0.5, 2), st.floats(0.1, 100))
def test_scaling_identity(alpha, beta, c, t):
    law = StableLaw(c, alpha, beta)
    xi = np.linspace(-4, 4, 9)
    scale = np.abs(law.exponent(xi)).max() + 1
    assert np.max(scaling_defect(law, t, xi)) < 1e-9 * scale * max(1, math.log(t) ** 2)


@pytest.mark.parametrize("alpha", [0.7, 1.3, 1.8])
def test_density_consistent_with_cdf(alpha):
    law = StableLaw(1.0, alpha, 0.3)
    x = np.linspace(-8, 8, 1601)
    mass = np.trapezoid(law.density(x), x)
    assert mass == pytest.approx(law.cdf(8.0) - law.cdf(-8.0), abs=1e-4)
