import math

import numpy as np
import pytest

from modlab import tilt


@pytest.fixture(scope="module")
def cw():
    return tilt.curie_weiss()


def test_quartic_integral_closed_form():
    # int e^{-x^4/12} dx = 2 * 12^(1/4) Gamma(5/4)
    assert tilt.quartic_integral() == pytest.approx(2 * 12**0.25 * math.gamma(1.25), rel=1e-14)
    assert tilt.quartic_integral() == pytest.approx(3.374010197800025, rel=1e-14)


def test_limit_integral_matches(cw):
    assert tilt.limit_integral(cw) == pytest.approx(tilt.quartic_integral(), rel=1e-12)


def test_gibbs_small_n(cw):
    pmf = tilt.brute_force_gibbs(2)
    assert pmf.probs[1] == pytest.approx(1 / (1 + math.e), rel=1e-14)
    np.testing.assert_allclose(tilt.tilted_pmf(cw, 9).probs, tilt.gibbs_magnetization_pmf(9).probs,
                               atol=1e-13)


def test_brute_force_limit():
    with pytest.raises(ValueError):
        tilt.brute_force_gibbs(21)


def test_abs_psi_consistent(cw):
    x = np.linspace(-3, 3, 13)
    for m in (0.0, 0.7):
        np.testing.assert_allclose(cw.strip_abs(100, x, m), np.abs(cw.psi_n(100, x + 1j * m)),
                                   rtol=1e-10)


def test_l1_distance_decreases(cw):
    d = [tilt.l1_distance(cw, n) for n in (100, 1000, 10_000)]
    assert d[0] > d[1] > d[2]


def test_a3_constant_and_decay(cw):
    C = tilt.a3_constant(cw, 1.0, [100, 1000])
    assert np.isfinite(C) and C > tilt.quartic_integral()
    rep = tilt.fourier_decay_check(cw, 1000, 1.0, np.linspace(-20, 20, 41), C=C)
    assert rep.all_passed


def test_a3_rejects_negative(cw):
    with pytest.raises(ValueError):
        tilt.a3_constant(cw, -1.0, [10])


def test_local_limit_epsilon_range(cw):
    with pytest.raises(ValueError):
        tilt.tilted_local_limit(cw, 100, 0.0, (-1, 1), 1.5)
    rep = tilt.tilted_local_limit(cw, 1000, 0.0, (-1, 1), 0.5)
    assert "regime" in rep.details


def test_psi_transform_at_zero(cw):
    v = tilt.psi_transform(cw, 1000, [0.0])[0]
    assert v == pytest.approx(tilt.strip_integral(cw, 1000, 0.0)[0], rel=1e-9)
