"""Stable laws: Levy exponents, densities by Fourier inversion, scaling.

The law with parameters ``(c, alpha, beta)`` has characteristic function
``exp(eta(i xi))`` with

    eta(i xi) = -|c xi|^alpha (1 - i beta h(alpha, xi) sgn(xi)),

where ``h = tan(pi alpha / 2)`` for ``alpha != 1`` and
``h = -(2 / pi) log|xi|`` for ``alpha == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma, gammaincc, gammaln

from .oracle.quadrature import QuadratureError, certified_quadrature


class StableDomainError(ValueError):
    """Parameters outside the domain of a series representation."""


@dataclass(frozen=True)
class StableLaw:
    """Stable law ``(c, alpha, beta)``.

    The numerical tolerances are part of the object but not of its
    identity: two laws with equal parameters compare equal.
    """

    c: float
    alpha: float
    beta: float
    quad_tol: float = field(default=1e-12, compare=False)
    tail_eps: float = field(default=1e-16, compare=False)
    series_tol: float = field(default=1e-16, compare=False)

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("scale c must be positive")
        if not 0 < self.alpha <= 2:
            raise ValueError("alpha must lie in (0, 2]")
        if not -1 <= self.beta <= 1:
            raise ValueError("beta must lie in [-1, 1]")

    @classmethod
    def gaussian(cls, **kw):
        """Standard normal: ``(1/sqrt(2), 2, 0)``."""
        return cls(1 / math.sqrt(2), 2.0, 0.0, **kw)

    @classmethod
    def cauchy(cls, **kw):
        return cls(1.0, 1.0, 0.0, **kw)

    @classmethod
    def levy(cls, **kw):
        return cls(1.0, 0.5, 1.0, **kw)

    @property
    def is_gaussian(self) -> bool:
        return self.alpha == 2

    def exponent(self, xi):
        return levy_exponent(self, xi)

    def charfn(self, xi):
        return np.exp(levy_exponent(self, xi))

    def density(self, x):
        return density(self, x)

    def cdf(self, x):
        return cdf(self, x)

    @property
    def cutoff(self) -> float:
        """Frequency beyond which ``exp(-|c xi|^alpha) < tail_eps``."""
        return math.log(1 / self.tail_eps) ** (1 / self.alpha) / self.c

    def tail_integral(self, xi_max: float) -> float:
        """Bound on ``int_{xi_max}^inf exp(-|c xi|^alpha) d xi``."""
        a = 1 / self.alpha
        return gamma(a) * gammaincc(a, (self.c * xi_max) ** self.alpha) / (self.alpha * self.c)


def _skew(alpha: float) -> float:
    return 0.0 if alpha == 2 else math.tan(math.pi * alpha / 2)


def levy_exponent(law: StableLaw, xi):
    """eta(i xi) for real ``xi``; ``eta(0) = 0`` in every branch."""
    xi = np.asarray(xi, dtype=float)
    mag = np.abs(law.c * xi) ** law.alpha
    sgn = np.sign(xi)
    if law.alpha != 1:
        return -mag * (1 - 1j * law.beta * _skew(law.alpha) * sgn)
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.where(xi != 0, np.log(np.abs(np.where(xi != 0, xi, 1.0))), 0.0)
    return -mag * (1 + 1j * law.beta * (2 / math.pi) * logx * sgn)


def density(law: StableLaw, x):
    """Density ``(1/pi) int_0^inf Re[exp(eta(i xi) - i x xi)] d xi``.

    The integral is cut at :attr:`StableLaw.cutoff` and the neglected part
    is bounded analytically.  Vectorized over ``x``: all points share the
    same adaptive panels.

    Raises
    ------
    QuadratureError
        If the requested accuracy ``law.quad_tol`` is not met.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    xi_max = law.cutoff
    tail = law.tail_integral(xi_max) / math.pi

    def integrand(xi):
        return np.real(np.exp(levy_exponent(law, xi) - 1j * flat * xi)) / math.pi

    spread = float(np.max(np.abs(flat))) if flat.size else 0.0
    period = 2 * math.pi / spread if spread > 0 else None
    res = certified_quadrature(integrand, 0.0, xi_max, tol=law.quad_tol, period=period,
                               points=[min(1.0, xi_max / 2)], tail_bound=tail)
    if res.error_bound > 10 * law.quad_tol:
        raise QuadratureError(f"density error bound {res.error_bound:.2e} above tolerance")
    out = np.maximum(np.asarray(res.value), 0.0)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def cdf(law: StableLaw, x):
    """Distribution function by the Gil-Pelaez inversion formula."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    xi_max = law.cutoff

    def integrand(xi):
        return np.imag(np.exp(levy_exponent(law, xi) - 1j * flat * xi)) / (math.pi * xi)

    spread = float(np.max(np.abs(flat))) if flat.size else 0.0
    period = 2 * math.pi / spread if spread > 0 else None
    res = certified_quadrature(integrand, 0.0, xi_max, tol=1e-10, period=period,
                               points=[min(1.0, xi_max / 2)])
    out = np.clip(0.5 - np.asarray(res.value), 0.0, 1.0)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def density_at_zero_series(law: StableLaw) -> float:
    r"""p(0) from the series

    .. math:: \frac{1}{\pi\alpha c}\sum_{k\ge0}(-1)^k (\beta\tan(\pi\alpha/2))^{2k}
              \frac{\Gamma(2k+1/\alpha)}{\Gamma(2k+1)}

    valid when ``|beta tan(pi alpha / 2)| < 1``.
    """
    if law.alpha == 1:
        if law.beta != 0:
            raise StableDomainError("|beta tan(alpha pi/2)| = inf >= 1 (alpha = 1, beta != 0)")
        r = 0.0
    else:
        r = law.beta * _skew(law.alpha)
    if abs(r) >= 1:
        raise StableDomainError(f"|beta tan(alpha pi/2)| = {abs(r)!r} >= 1")
    a = 1 / law.alpha
    total = 0.0
    if r == 0:
        total = math.exp(gammaln(a))
    else:
        log_r2 = 2 * math.log(abs(r))
        for k in range(10**7):
            term = math.exp(k * log_r2 + gammaln(2 * k + a) - gammaln(2 * k + 1))
            total += -term if k % 2 else term
            if term < law.series_tol * abs(total) and k > 1:
                break
        else:
            raise StableDomainError("density-at-zero series did not converge")
    return total / (math.pi * law.alpha * law.c)


def scaling_defect(law: StableLaw, t: float, xi):
    r"""Residual of the scaling identity.

    For ``alpha != 1`` this is ``|t eta(i xi / t^{1/alpha}) - eta(i xi)|``.  For
    ``alpha == 1`` the logarithm produces a drift and the identity reads
    ``t eta(i xi / t) = eta(i xi) + (2 c beta / pi) log(t) i xi``; the
    residual of that identity is returned.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    xi = np.asarray(xi, dtype=float)
    if law.alpha != 1:
        lhs = t * levy_exponent(law, xi / t ** (1 / law.alpha))
        return np.abs(lhs - levy_exponent(law, xi))
    drift = 2 * law.c * law.beta / math.pi * math.log(t) * 1j * xi
    return np.abs(t * levy_exponent(law, xi / t) - levy_exponent(law, xi) - drift)
