"""Band-limited test functions and Parseval expectations.

Convention, used throughout the package::

    f_hat(xi) = int f(x) exp(i x xi) dx,     f(x) = (1/2pi) int f_hat(xi) exp(-i xi x) d xi.

The indicator sandwiches are built from Beurling's entire function ``B``,
which majorizes ``sgn`` with ``int (B - sgn) = 1`` and has Fourier transform
supported in ``[-2pi, 2pi]``.  Selberg's combinations of dilated copies of
``B`` give a majorant and a minorant of ``1_(a,b)`` with band limit ``K``
and excess ``2pi/K`` each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import polygamma

from .oracle.quadrature import QuadratureError, certified_quadrature, gauss_legendre_panels


def beurling(z):
    """Beurling's majorant of ``sgn``.

    Closed forms in terms of the trigamma function: for ``z >= 0``,
    ``1 + (sin(pi z)/pi)^2 (2/z - 2 psi_1(1 + z))`` and for ``z < 0``,
    ``-1 + (sin(pi z)/pi)^2 (2 psi_1(-z) + 2/z)``.
    """
    z = np.asarray(z, dtype=float)
    out = np.ones(z.shape)
    s2 = (np.sin(np.pi * z) / np.pi) ** 2
    pos = z > 0
    neg = z < 0
    zp, zn = z[pos], z[neg]
    out[pos] = 1 + s2[pos] * (2 / zp - 2 * polygamma(1, 1 + zp))
    out[neg] = -1 + s2[neg] * (2 * polygamma(1, -zn) + 2 / zn)
    return out


def _jackson_hat(u):
    # Fourier transform (in cycle units) of the odd part of B on |u| < 1
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    out = np.zeros(u.shape)
    inside = (au < 1) & (au > 0)
    ui = u[inside]
    out[inside] = np.pi * ui * (1 - np.abs(ui)) / np.tan(np.pi * ui) + np.abs(ui)
    out[u == 0] = 1.0
    return out


def _fejer_hat(u):
    return np.maximum(1 - np.abs(np.asarray(u, dtype=float)), 0.0)


def _indicator_hat(a, b, xi):
    xi = np.asarray(xi, dtype=float)
    out = np.full(xi.shape, complex(b - a))
    nz = xi != 0
    x = xi[nz]
    out[nz] = (np.exp(1j * b * x) - np.exp(1j * a * x)) / (1j * x)
    return out


@dataclass(frozen=True, eq=False)
class FourierTestFunction:
    """A real function known through its compactly supported transform.

    Parameters
    ----------
    K : float
        Support bound: ``f_hat`` vanishes outside ``[-K, K]``.
    transform : callable
        ``xi -> f_hat(xi)`` on ``[-K, K]``; values outside are discarded.
    values : callable, optional
        Closed-form point evaluation ``x -> f(x)``.  When absent, points are
        evaluated by Fourier inversion.
    l1_norm : float
        ``||f||_1``; exact for single Selberg functions, a triangle-inequality
        bound for sums.
    centers : tuple of float
        Locations where the mass of ``f`` sits; used only to pick
        oscillation-aware quadrature panels.
    grid : tuple of arrays, optional
        Sampled representation ``(xi, f_hat(xi))`` on a uniform grid of
        ``[0, K]``.  When present, expectations use the trapezoidal rule.
    """

    K: float
    transform: Callable
    values: Callable | None = None
    l1_norm: float = float("nan")
    centers: tuple = (0.0,)
    grid: tuple | None = field(default=None, repr=False)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape, dtype=complex)
        band = np.abs(xi) <= self.K
        if self.K > 0 and np.any(band):
            out[band] = self.transform(xi[band])
        return out

    def __call__(self, x):
        if self.values is not None:
            return self.values(np.asarray(x, dtype=float))
        return self.invert(x)

    def invert(self, x, tol: float = 1e-11):
        """Point values from ``(1/pi) int_0^K Re[f_hat(xi) e^{-i xi x}] d xi``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.K == 0:
            return np.zeros(x.shape)
        spread = max(np.max(np.abs(x)), max(abs(c) for c in self.centers), 1.0)
        res = certified_quadrature(
            lambda xi: np.real(self.fourier(np.array([xi]))[0] * np.exp(-1j * xi * x)) / math.pi,
            0.0, self.K, tol=tol, period=2 * math.pi / spread,
        )
        return np.asarray(res.value)

    @property
    def integral(self) -> float:
        return float(np.real(self.fourier(np.array([0.0]))[0]))

    def rescaled(self, scale: float, center: float = 0.0) -> "FourierTestFunction":
        """``g(y) = f(scale * (y - center))``."""
        if not scale > 0:
            raise ValueError("scale must be positive")
        base = self

        def transform(xi):
            return np.exp(1j * center * xi) * base.fourier(xi / scale) / scale

        values = None
        if base.values is not None:
            def values(y):
                return base.values(scale * (y - center))
        return FourierTestFunction(
            scale * base.K, transform, values, base.l1_norm / scale,
            tuple(center + c / scale for c in base.centers),
        )

    def __add__(self, other: "FourierTestFunction") -> "FourierTestFunction":
        f, g = self, other

        def transform(xi):
            return f.fourier(xi) + g.fourier(xi)

        values = None
        if f.values is not None and g.values is not None:
            def values(x):
                return f.values(x) + g.values(x)
        return FourierTestFunction(max(f.K, g.K), transform, values,
                                   f.l1_norm + g.l1_norm, f.centers + g.centers)

    def __neg__(self):
        f = self
        values = None if f.values is None else (lambda x: -f.values(x))
        return FourierTestFunction(f.K, lambda xi: -f.fourier(xi), values, f.l1_norm, f.centers)

    def __sub__(self, other):
        return self + (-other)

    def sampled(self, points: int = 4096) -> "FourierTestFunction":
        """Copy carrying ``f_hat`` on a uniform grid of ``[0, K]``."""
        xi = np.linspace(0.0, self.K, points + 1)
        return FourierTestFunction(self.K, self.transform, self.values, self.l1_norm,
                                   self.centers, (xi, self.fourier(xi)))


def zero_function() -> FourierTestFunction:
    return FourierTestFunction(0.0, lambda xi: np.zeros(np.shape(xi), dtype=complex),
                               lambda x: np.zeros(np.shape(x)), 0.0)


def fejer(K: float, center: float = 0.0) -> FourierTestFunction:
    """Non-negative kernel with triangular spectrum ``(1 - |xi|/K)_+``.

    ``f(x) = (K / 2pi) sinc^2(K x / 2pi)`` with unit integral.
    """
    def values(x):
        return K / (2 * np.pi) * np.sinc(K * (x - center) / (2 * np.pi)) ** 2

    def transform(xi):
        return np.exp(1j * center * xi) * _fejer_hat(xi / K)

    return FourierTestFunction(K, transform, values, 1.0, (center,))


def _selberg_transform(a, b, K, sign):
    def transform(xi):
        u = xi / K
        edge = np.exp(1j * a * xi) + np.exp(1j * b * xi)
        return _indicator_hat(a, b, xi) * _jackson_hat(u) + sign * (np.pi / K) * _fejer_hat(u) * edge
    return transform


def _tail_l1(delta, z_max):
    # |B(z) - sgn z| <= 1/(pi^2 z^2) far out, averaging to half of that
    return 1.0 / (2 * np.pi**2 * delta * z_max)


def selberg_majorant(a: float, b: float, K: float) -> FourierTestFunction:
    """Majorant ``(B(delta(x - a)) + B(delta(b - x)))/2`` of ``1_(a,b)``, ``delta = K/2pi``."""
    if not a < b or not K > 0:
        raise ValueError("need a < b and K > 0")
    delta = K / (2 * np.pi)

    def values(x):
        return 0.5 * (beurling(delta * (x - a)) + beurling(delta * (b - x)))

    return FourierTestFunction(K, _selberg_transform(a, b, K, +1.0), values,
                               b - a + 2 * np.pi / K, (a, b))


def selberg_minorant(a: float, b: float, K: float) -> FourierTestFunction:
    """Minorant ``-(B(delta(a - x)) + B(delta(x - b)))/2`` of ``1_(a,b)``."""
    if not a < b or not K > 0:
        raise ValueError("need a < b and K > 0")
    delta = K / (2 * np.pi)

    def values(x):
        return -0.5 * (beurling(delta * (a - x)) + beurling(delta * (x - b)))

    # ||g||_1 = int g + 2 int g_-, the negative part integrated numerically
    neg = _negative_mass(values, a, b, delta)
    return FourierTestFunction(K, _selberg_transform(a, b, K, -1.0), values,
                               b - a - 2 * np.pi / K + 2 * neg, (a, b))


def _negative_mass(values, a, b, delta, z_max: float = 2000.0):
    span = z_max / delta
    lo, hi = a - span, b + span
    panels = int(2 * z_max + (b - a) * delta) + 1

    def neg(x):
        return np.maximum(-values(x), 0.0)

    body = gauss_legendre_panels(neg, lo, hi, panels, order=16)
    return body + 2 * _tail_l1(delta, z_max)


def sandwich_indicator(intervals, eta: float):
    """Minorant and majorant of ``1_B`` for ``B`` a finite disjoint union.

    With ``m`` intervals the band limit is ``K = 4 pi m / eta`` so that
    ``int (g_2 - g_1) = eta``.

    Returns
    -------
    (g1, g2) : tuple of FourierTestFunction
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        if a1 < b0:
            raise ValueError(f"intervals ({a0}, {b0}) and ({a1}, {b1}) overlap")
    if not ivs:
        return zero_function(), zero_function()
    K = 4 * np.pi * len(ivs) / eta
    lower = [selberg_minorant(a, b, K) for a, b in ivs]
    upper = [selberg_majorant(a, b, K) for a, b in ivs]
    g1, g2 = lower[0], upper[0]
    for lo, up in zip(lower[1:], upper[1:]):
        g1, g2 = g1 + lo, g2 + up
    return g1, g2


def expectation_via_parseval(f: FourierTestFunction, charfn, tol: float = 1e-12,
                             scale: float = 10.0) -> float:
    """E[f(Y)] from the characteristic function of ``Y``.

    ``E[f(Y)] = (1/2pi) int f_hat(xi) conj(charfn(xi)) d xi``, folded onto
    ``[0, K]`` by conjugate symmetry so the result is real by construction.

    Parameters
    ----------
    charfn : callable
        Vectorized ``xi -> E[exp(i xi Y)]``.
    scale : float
        Rough magnitude of ``Y``; together with the centres of ``f`` it sets
        the panel width of the oscillatory quadrature.
    """
    if f.K == 0:
        return 0.0
    if f.grid is not None:
        xi, fh = f.grid
        return float(trapezoid(np.real(fh * np.conj(charfn(xi))), xi) / np.pi)
    spread = scale + max(abs(c) for c in f.centers)
    res = certified_quadrature(
        lambda xi: float(np.real(f.fourier(np.array([xi]))[0] * np.conj(charfn(np.array([xi]))[0]))),
        0.0, f.K, tol=tol, period=2 * np.pi / spread, points=[f.K / 2],
    )
    return float(res.value) / np.pi


__all__ = [
    "FourierTestFunction", "QuadratureError", "beurling", "expectation_via_parseval",
    "fejer", "sandwich_indicator", "selberg_majorant", "selberg_minorant", "zero_function",
]
