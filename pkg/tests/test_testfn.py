import math

import numpy as np
import pytest

from modlab import testfn
from modlab.stable import StableLaw


def test_beurling_majorizes_sign():
    z = np.linspace(-20, 20, 4001)
    assert np.all(testfn.beurling(z) >= np.sign(z) - 1e-12)
    # integral of B - sgn is one
    z = np.linspace(-2000, 2000, 2_000_001)
    assert np.trapezoid(testfn.beurling(z) - np.sign(z), z) == pytest.approx(1.0, abs=2e-3)


def test_fejer_transform_matches_values():
    f = testfn.fejer(5.0, center=0.3)
    x = np.array([-1.0, 0.3, 2.0])
    np.testing.assert_allclose(f.invert(x), f.values(x), atol=1e-10)
    assert f.integral == pytest.approx(1.0)


def test_majorant_transform_matches_values():
    g = testfn.selberg_majorant(-0.5, 1.0, 20.0)
    x = np.array([-2.0, 0.0, 0.99, 3.0])
    np.testing.assert_allclose(g.invert(x), g.values(x), atol=1e-9)


def test_sandwich_handles_unions_and_overlap():
    g1, g2 = testfn.sandwich_indicator([(0, 1), (2, 3)], 0.5)
    assert g2.integral - g1.integral == pytest.approx(0.5)
    assert g1.integral <= 2 <= g2.integral
    with pytest.raises(ValueError):
        testfn.sandwich_indicator([(0, 2), (1, 3)], 0.5)
    z1, z2 = testfn.sandwich_indicator([], 0.5)
    assert z1.K == z2.K == 0


def test_minorant_l1_norm():
    g = testfn.selberg_minorant(0.0, 1.0, 30.0)
    x = np.linspace(-400, 400, 4_000_001)
    assert np.trapezoid(np.abs(g.values(x)), x) == pytest.approx(g.l1_norm, rel=1e-3)


def test_parseval_against_direct_gaussian():
    f = testfn.fejer(4.0)
    law = StableLaw.gaussian()
    x = np.linspace(-30, 30, 200_001)
    ref = np.trapezoid(f.values(x) * np.exp(-x**2 / 2) / math.sqrt(2 * math.pi), x)
    assert testfn.expectation_via_parseval(f, law.charfn) == pytest.approx(ref, abs=1e-9)
    sampled = f.sampled(8192)
    assert testfn.expectation_via_parseval(sampled, law.charfn) == pytest.approx(ref, abs=1e-6)


def test_rescaled_transform():
    f = testfn.fejer(3.0)
    g = f.rescaled(2.0, center=1.0)
    y = np.array([0.0, 1.0, 1.7])
    np.testing.assert_allclose(g.invert(y), f.values(2.0 * (y - 1.0)), atol=1e-9)
    assert g.K == 6.0
