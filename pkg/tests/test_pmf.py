import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modlab.pmf import ExactPmf


def test_rejects_unnormalized():
    with pytest.raises(ValueError):
        ExactPmf(0, 1, [0.5, 0.4])


def test_rejects_negative_and_bad_step():
    with pytest.raises(ValueError):
        ExactPmf(0, 1, [1.5, -0.5])
    with pytest.raises(ValueError):
        ExactPmf(0, 0, [1.0])


def test_moments_and_charfn():
    pmf = ExactPmf(-1, 2, [0.25, 0.5, 0.25])
    assert pmf.mean() == pytest.approx(1.0)
    assert pmf.var() == pytest.approx(2.0)
    xi = np.linspace(-3, 3, 7)
    expected = 0.25 * np.exp(-1j * xi) + 0.5 * np.exp(1j * xi) + 0.25 * np.exp(3j * xi)
    np.testing.assert_allclose(pmf.charfn(xi), expected, atol=1e-15)


def test_affine_negative_slope_reverses():
    pmf = ExactPmf(0, 1, [0.2, 0.3, 0.5]).affine(-2, 1)
    np.testing.assert_allclose(pmf.support, [-3, -1, 1])
    np.testing.assert_allclose(pmf.probs, [0.5, 0.3, 0.2])


def test_interval_mass_is_half_open():
    pmf = ExactPmf(0, 1, [0.25] * 4)
    assert pmf.interval_mass(0, 2) == pytest.approx(0.5)
    assert pmf.interval_mass(-0.5, 0) == pytest.approx(0.25)
    assert pmf.interval_mass(2, 2) == 0.0


def test_log_weights_stable():
    pmf = ExactPmf.from_log_weights(0, 1, [1000.0, 1000.0])
    np.testing.assert_allclose(pmf.probs, [0.5, 0.5])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=30),
       st.floats(-5, 5), st.floats(0.1, 3))
def test_charfn_at_zero_and_cdf_monotone(weights, offset, step):
    pmf = ExactPmf.from_weights(offset, step, weights)
    assert abs(pmf.charfn(np.array([0.0]))[0] - 1) < 1e-12
    c = pmf.cdf(np.linspace(offset - 1, offset + step * len(weights) + 1, 50))
    assert np.all(np.diff(c) >= -1e-15)
    assert c[0] == 0 and c[-1] == pytest.approx(1.0)
