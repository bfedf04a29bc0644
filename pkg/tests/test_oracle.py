import math

import mpmath
import numpy as np
import pytest

from modlab.oracle import pmfs, special
from modlab.oracle.quadrature import QuadratureError, certified_quadrature


def test_partition_numbers():
    assert pmfs.partition_numbers(10)[:11] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert pmfs.partition_numbers(100)[100] == 190569292


def test_plane_partition_numbers():
    assert pmfs.plane_partition_numbers(6)[:7] == (1, 1, 3, 6, 13, 24, 48)


def test_euler_pmf_frozen_value():
    pmf = pmfs.euler_partition_pmf(0.5)
    assert pmf.probs[0] == pytest.approx(0.28878809508660247, rel=1e-13)


def test_partition_routes_agree():
    a = pmfs.euler_partition_pmf(0.7, 200)
    b = pmfs.partition_pmf_divisor(0.7, 200)
    np.testing.assert_allclose(a.probs, b.probs, atol=1e-14)


def test_prime_reciprocals():
    primes = pmfs.prime_sieve(100)
    assert len(primes) == 25
    assert float(np.sum(1.0 / primes)) == pytest.approx(1.802817201048871, rel=1e-14)


def test_triangle_pmf_small():
    pmf = pmfs.triangle_count_pmf(3, 0.5)
    np.testing.assert_allclose(pmf.probs, [7 / 8, 1 / 8])
    assert pmfs.triangle_count_pmf(7, 0.5).mean() == pytest.approx(35 / 8)


def test_markov_visit_pmf_iid_case():
    # rows equal: visits are binomial
    P = [[0.3, 0.7], [0.3, 0.7]]
    pmf = pmfs.markov_visit_pmf(P, 0, 4)
    assert pmf.mean() == pytest.approx(pmf.probs @ np.arange(len(pmf)) * pmf.step + pmf.offset)
    assert 0 < pmf.probs[0] < 1


def test_stationary_distribution():
    pi = pmfs.stationary_distribution(np.array([[0.7, 0.3], [0.2, 0.8]]))
    np.testing.assert_allclose(pi, [0.4, 0.6])


def test_return_time_mean_is_inverse_stationary():
    f = pmfs.return_time_distribution(np.array([[0.7, 0.3], [0.2, 0.8]]), 0)
    k = np.arange(1, f.size + 1)
    assert float(np.sum(k * f)) == pytest.approx(1 / 0.4, rel=1e-10)


@pytest.mark.parametrize("nu,x", [(0.0, 0.3), (1.5, 2.0), (-0.5, 0.7), (3.0, 5.0)])
def test_bessel_against_mpmath(nu, x):
    assert special.bessel_i(nu, x) == pytest.approx(float(mpmath.besseli(nu, x)), rel=1e-14)


@pytest.mark.parametrize("a,b,z", [(0.3 + 1j, 0.3 - 1j, 0.5), (2j, -1j, 1 / 3), (1.5, 0.5, -0.4)])
def test_hyp2f1_against_mpmath(a, b, z):
    ref = complex(mpmath.hyp2f1(a, b, 1, z))
    assert abs(special.hyp2f1_c1(a, b, z) - ref) < 1e-13 * max(1, abs(ref))


def test_hyp2f1_domain():
    with pytest.raises(ValueError):
        special.hyp2f1_c1(1, 1, 0.9)


def test_certified_quadrature_matches_closed_form():
    res = certified_quadrature(math.cos, 0, math.pi / 2, tol=1e-12)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.error_bound <= 1e-12


def test_certified_quadrature_raises_when_target_missed():
    with pytest.raises(QuadratureError):
        certified_quadrature(lambda x: math.sin(1 / x) / x, 1e-8, 1, tol=1e-15, limit=20)
