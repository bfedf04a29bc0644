"""Special functions used by the model zoo.

Log-gamma and digamma are delegated to :mod:`scipy.special`.  The two
series that the models evaluate in unusual regimes (modified Bessel
functions at tiny arguments, and the Gauss function with ``c = 1`` at
``|z| <= 1/2``) are summed here with a ratio-test remainder bound, so every
value comes with a certificate.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sc

MAX_TERMS = 100_000


class SeriesError(ArithmeticError):
    """A series failed to certify convergence within the term budget."""


def log_gamma(z):
    """Principal branch of log Gamma, real or complex."""
    return sc.loggamma(z)


def digamma(x):
    return sc.digamma(x)


def trigamma(x):
    return sc.polygamma(1, x)


def bessel_i(nu, x, tol: float = 1e-17, return_bound: bool = False):
    r"""Modified Bessel function of the first kind by its power series.

    .. math:: I_\nu(x) = \sum_{k\ge0} \frac{(x/2)^{\nu+2k}}{k!\,\Gamma(\nu+k+1)}

    Valid for ``nu >= -1/2`` and ``x > 0``; intended for small ``x`` where
    the series converges in a handful of terms.  Summation stops when the
    geometric remainder bound drops below ``tol`` times the partial sum.
    """
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    nu, x = np.broadcast_arrays(nu, x)
    if np.any(nu < -0.5) or np.any(x <= 0):
        raise ValueError("bessel_i needs nu >= -1/2 and x > 0")
    q = (x / 2.0) ** 2
    term = np.exp(nu * np.log(x / 2.0) - sc.gammaln(nu + 1.0))
    total = term.copy()
    bound = np.full(term.shape, np.inf)
    for k in range(MAX_TERMS):
        ratio = q / ((k + 1.0) * (nu + k + 1.0))
        term = term * ratio
        total = total + term
        # later ratios are smaller, so the tail is dominated geometrically
        nxt = q / ((k + 2.0) * (nu + k + 2.0))
        with np.errstate(divide="ignore"):
            bound = np.where(nxt < 1, term * nxt / (1 - nxt), np.inf)
        if np.all(bound <= tol * np.abs(total)):
            break
    else:
        raise SeriesError("bessel_i series did not converge")
    return (total, bound) if return_bound else total


def hyp2f1_c1(a, b, z, tol: float = 1e-17, return_bound: bool = False):
    r"""Gauss hypergeometric function :math:`{}_2F_1(a, b; 1; z)`.

    Uses the defining series :math:`\sum_m (a)_m (b)_m z^m / (m!)^2`, which
    converges geometrically for ``|z| <= 1/2``.  ``a`` and ``b`` may be
    complex arrays and broadcast against each other; ``z`` is a real
    scalar.

    The remainder after ``m`` terms is bounded by
    ``|t_{m+1}| / (1 - rho)`` with ``rho = ((m + 2 + A) / (m + 2))^2 |z|``
    and ``A = max(|a|, |b|)``, once ``rho < 1``.
    """
    if abs(z) > 0.5:
        raise ValueError("series evaluation restricted to |z| <= 1/2")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    big = float(max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0)))
    term = np.ones(a.shape, dtype=complex)
    total = term.copy()
    for m in range(MAX_TERMS):
        term = term * (a + m) * (b + m) * (z / ((m + 1.0) ** 2))
        total = total + term
        rho = ((m + 2.0 + big) / (m + 2.0)) ** 2 * abs(z)
        if rho < 1:
            bound = np.abs(term) * rho / (1.0 - rho)
            if np.all(bound <= tol * np.maximum(np.abs(total), 1e-300)) or np.all(bound < 1e-300):
                break
    else:
        raise SeriesError("hypergeometric series did not converge")
    return (total, bound) if return_bound else total
