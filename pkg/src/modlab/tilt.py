"""Mod-Gaussian convergence on the real axis and the exponential change of measure.

Here the residue is ``psi_n(x) = E[e^{x X_n}] e^{-t_n x^2 / 2}``, a Laplace
transform rather than a Fourier one.  Reweighting the law of ``X_n`` by
``e^{x^2 / 2 t_n}`` produces ``Y_n``, and ``Y_n / t_n`` converges to the
density ``psi / int psi``.  Two hypotheses drive the local limit theorem for
``Y_n``: (A1), L1 convergence ``psi_n -> psi`` on the real line, and (A3),
uniform L1 bounds of ``psi_n`` on horizontal lines ``Im z = m``.  There is no
(A2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy.special import gamma

from .modphi import LocalLimitReport, _intervals, _measure
from .oracle.pmfs import curie_weiss_pmf
from .oracle.quadrature import certified_quadrature
from .pmf import ExactPmf

A3_LIMIT = 1e12
STRIP_TAIL = 1e-14


class A3Failure(ArithmeticError):
    """The strip integrals of ``psi_n`` are not uniformly bounded."""


@dataclass(frozen=True, eq=False)
class LaplaceModel:
    """A sequence ``X_n`` that is mod-Gaussian on the real axis.

    ``psi_n(n, z)`` takes complex arrays; ``abs_psi_n(n, x, m)``, when given,
    evaluates ``|psi_n(x + i m)|`` without overflow for real arrays ``x``.
    ``base_pmf(n)`` is the exact law of ``X_n``.
    """

    name: str
    t: Callable[[Any], float]
    psi_n: Callable
    psi_limit: Callable
    base_pmf: Callable | None = None
    abs_psi_n: Callable | None = None
    charfn: Callable | None = None
    tail_bound: Callable | None = None
    index_name: str = "n"
    default_indices: tuple = ()
    info: dict = field(default_factory=dict)

    def strip_abs(self, n, x, m: float = 0.0):
        if self.abs_psi_n is not None:
            return self.abs_psi_n(n, x, m)
        return np.abs(self.psi_n(n, np.asarray(x, dtype=float) + 1j * m))


def tilted_pmf(model: LaplaceModel, n) -> ExactPmf:
    """Law of ``Y_n``: ``P_X`` reweighted by ``e^{x^2 / 2 t_n}``, normalized in log space."""
    if model.base_pmf is None:
        raise ValueError(f"model {model.name!r} has no exact base pmf")
    base = model.base_pmf(n)
    x = base.support
    with np.errstate(divide="ignore"):
        logw = np.log(base.probs) + x**2 / (2 * model.t(n))
    return ExactPmf.from_log_weights(base.offset, base.step, logw)


# --- strip integrals ---------------------------------------------------------------

def _strip_cutoff(model, n, m):
    """Truncation ``X`` with the strip tail below ``STRIP_TAIL``."""
    if model.tail_bound is not None:
        return model.tail_bound(n, m, STRIP_TAIL)
    X = 10.0
    while model.strip_abs(n, np.array([X]), m)[0] > STRIP_TAIL and X < 1e6:
        X *= 1.5
    return X


def strip_integral(model: LaplaceModel, n, m: float = 0.0) -> tuple[float, float]:
    """``int |psi_n(x + i m)| dx`` and its error bound (quadrature plus tail)."""
    X = _strip_cutoff(model, n, m)
    res = certified_quadrature(lambda x: model.strip_abs(n, x, m), 0.0, X, tol=1e-12,
                               rtol=1e-10, tail_bound=STRIP_TAIL)
    # |psi_n(-x + i m)| = |psi_n(x - i m)| = |psi_n(x + i m)| for real-coefficient transforms
    return 2 * float(res.value), 2 * res.error_bound


def a3_constant(model: LaplaceModel, M: float, n_set, m_points: int = 21) -> float:
    """Numerical ``C(M) = sup_n sup_{|m| <= M} int |psi_n(x + i m)| dx`` over ``n_set``.

    The supremum in ``m`` is taken on a uniform grid of ``[0, M]`` (the
    integral is even in ``m``).

    Raises
    ------
    A3Failure
        If any strip integral exceeds ``1e12`` or is not finite.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    worst = 0.0
    for n in n_set:
        for m in np.linspace(0.0, M, m_points if M > 0 else 1):
            value, err = strip_integral(model, n, float(m))
            if not math.isfinite(value) or value > A3_LIMIT:
                raise A3Failure(f"strip integral {value:.3e} at n = {n}, m = {m:.3f}")
            worst = max(worst, value + err)
    return worst


@dataclass
class DecayReport:
    n: Any
    M: float
    C: float
    xi: list
    transform: list
    bound: list
    passed: list

    @property
    def all_passed(self) -> bool:
        return all(self.passed)


def psi_transform(model: LaplaceModel, n, xi, return_error: bool = False):
    """``psi_hat_n(xi) = int psi_n(x) e^{i x xi} dx`` for real, even ``psi_n``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    X = _strip_cutoff(model, n, 0.0)
    spread = float(np.max(np.abs(xi))) if xi.size else 0.0
    res = certified_quadrature(
        lambda x: model.strip_abs(n, x, 0.0) * np.cos(x * xi), 0.0, X, tol=1e-12,
        period=2 * math.pi / spread if spread > 0 else None, tail_bound=STRIP_TAIL,
    )
    values = 2 * np.asarray(res.value)
    return (values, 2 * res.error_bound) if return_error else values


def fourier_decay_check(model: LaplaceModel, n, M: float, xi_grid,
                        n_set=None, C: float | None = None) -> DecayReport:
    """Check ``|psi_hat_n(xi)| <= 2 C(M) e^{-M |xi|}`` on ``xi_grid``.

    ``C`` defaults to :func:`a3_constant` over ``n_set`` (default ``[n]``).
    The certified quadrature error of ``psi_hat_n`` is added to the bound.
    """
    if C is None:
        C = a3_constant(model, M, n_set if n_set is not None else [n])
    xi = np.asarray(xi_grid, dtype=float)
    values, err = psi_transform(model, n, xi, return_error=True)
    bound = 2 * C * np.exp(-M * np.abs(xi))
    passed = np.abs(values) <= bound + err
    return DecayReport(n, float(M), float(C), xi.tolist(), values.tolist(), bound.tolist(),
                       passed.tolist())


def l1_distance(model: LaplaceModel, n) -> float:
    """``||psi_n - psi||_1`` on the real line."""
    X = _strip_cutoff(model, n, 0.0)
    res = certified_quadrature(lambda x: np.abs(model.strip_abs(n, x, 0.0) - model.psi_limit(x)),
                               0.0, X, tol=1e-13, rtol=1e-10)
    return 2 * float(res.value)


def tilted_local_limit(model: LaplaceModel, n, x: float, B, epsilon: float) -> LocalLimitReport:
    """``t_n^eps P[Y_n / t_n - x in B / t_n^eps]`` against ``psi(x) m(B) / int psi``.

    The probability is summed exactly over the tilted pmf with half-open
    windows ``(a, b]``.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    ivs = _intervals(B)
    t = model.t(n)
    s = t**epsilon
    law = tilted_pmf(model, n).affine(1 / t, 0.0)
    lhs = s * math.fsum(law.interval_mass(x + a / s, x + b / s) for a, b in ivs)
    norm = limit_integral(model)
    target = float(model.psi_limit(np.array([x]))[0]) * _measure(ivs) / norm
    details = {"epsilon": epsilon, "psi_integral": norm}
    details.update(model.info.get("epsilon_note", {}))
    return LocalLimitReport(model.name, n, epsilon, float(x), [list(iv) for iv in ivs], float(lhs),
                            target, "exact", None, details)


_LIMIT_INTEGRALS: dict = {}


def limit_integral(model: LaplaceModel) -> float:
    """``int psi`` by quadrature, cached per model name."""
    key = model.name
    if key not in _LIMIT_INTEGRALS:
        total = 0.0
        lo = 0.0
        # integrate outward in blocks until a block adds nothing
        while True:
            block = certified_quadrature(model.psi_limit, lo, lo + 8.0, tol=1e-15, rtol=1e-13).value
            total += float(block)
            lo += 8.0
            if block < 1e-17:
                break
        _LIMIT_INTEGRALS[key] = 2 * total
    return _LIMIT_INTEGRALS[key]


# --- Curie-Weiss --------------------------------------------------------------------

def _log_cosh(u):
    au = np.abs(u)
    return au + np.log1p(np.exp(-2 * au)) - math.log(2)


def _log_cosh_complex(w):
    w = np.asarray(w, dtype=complex)
    w = np.where(w.real < 0, -w, w)
    return w + np.log1p(np.exp(-2 * w)) - math.log(2)


def quartic_integral() -> float:
    """12^(1/4) Gamma(1/4) / 2, the closed form of int exp(-y^4/12) dy."""
    return 12**0.25 * gamma(0.25) / 2


def curie_weiss_constant(M: float) -> float:
    """The quoted strip bound ``e^{13 M^4 / 12}(2 sqrt(3) M + I_inf)``, up to ``1 + o(1)``."""
    return math.exp(13 * M**4 / 12) * (2 * math.sqrt(3) * M + quartic_integral())


def curie_weiss() -> LaplaceModel:
    """Critical Curie-Weiss magnetization through i.i.d. fair signs.

    ``X_n = (sum sigma_i) / n^(1/4)`` with ``t_n = sqrt(n)`` and
    ``psi_n(z) = cosh(z / n^(1/4))^n e^{-sqrt(n) z^2 / 2}``; the tilted
    variable ``Y_n`` is the Curie-Weiss magnetization divided by ``n^(1/4)``,
    and ``psi(x) = e^{-x^4 / 12}``.
    """

    def t(n):
        if n < 1:
            raise ValueError("n must be positive")
        return math.sqrt(n)

    def psi_n(n, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(n * _log_cosh_complex(z / n**0.25) - math.sqrt(n) * z * z / 2)

    def abs_psi_n(n, x, m=0.0):
        # |cosh(u + iv)|^2 = cosh^2 u - sin^2 v
        x = np.asarray(x, dtype=float)
        u = x / n**0.25
        v = m / n**0.25
        lc = _log_cosh(u)
        with np.errstate(divide="ignore"):
            log_mod = n * (lc + 0.5 * np.log1p(-np.sin(v) ** 2 * np.exp(-2 * lc)))
        return np.exp(log_mod - math.sqrt(n) * (x * x - m * m) / 2)

    def psi_limit(x):
        return np.exp(-np.asarray(x, dtype=float) ** 4 / 12)

    @lru_cache(maxsize=16)
    def base_pmf(n):
        # fair signs: binomial weights on (2k - n) / n^(1/4)
        k = np.arange(n + 1)
        from scipy.special import gammaln

        logw = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
        scale = n**-0.25
        return ExactPmf.from_log_weights(-n * scale, 2 * scale, logw)

    def charfn(n, xi):
        # E exp(i xi X_n) = cos(xi / n^(1/4))^n
        xi = np.asarray(xi, dtype=float)
        return np.cos(xi / n**0.25).astype(complex) ** n

    def tail_bound(n, m, eps):
        # |psi_n(x + i m)| <= exp(n^(3/4)|x| - sqrt(n)(x^2 - m^2)/2); Gaussian tail beyond X
        a = math.sqrt(n) / 2
        b = n**0.75
        c = math.sqrt(n) * m * m / 2
        X = b / (2 * a) + 1.0
        while True:
            log_tail = -a * X * X + b * X + c - math.log(2 * a * X - b)
            if log_tail < math.log(eps):
                return X
            X *= 1.1

    return LaplaceModel(
        name="curie_weiss", t=t, psi_n=psi_n, psi_limit=psi_limit, base_pmf=base_pmf,
        abs_psi_n=abs_psi_n, charfn=charfn, tail_bound=tail_bound, default_indices=(100, 1000, 10_000),
        info={"epsilon_note": {"regime": "convergence proved for t_n^eps = n^(eps/2), eps in (0, 1]; "
                                         "the magnetization display uses n^eps with eps in (0, 1/2]"}},
    )


def gibbs_magnetization_pmf(n: int) -> ExactPmf:
    """Magnetization / n^(1/4) under the Curie-Weiss Gibbs weights, from the direct pmf."""
    pmf = curie_weiss_pmf(n)
    return pmf.affine(n**-0.25, 0.0)


def brute_force_gibbs(n: int) -> ExactPmf:
    """Enumerate all ``2^n`` spin configurations; small ``n`` only."""
    if n > 20:
        raise ValueError("brute force limited to n <= 20")
    configs = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1) * 2 - 1
    M = configs.sum(axis=1)
    w = np.exp(M.astype(float) ** 2 / (2 * n))
    mass = np.bincount((M + n) // 2, weights=w, minlength=n + 1)
    scale = n**-0.25
    return ExactPmf.from_weights(-n * scale, 2 * scale, mass)


__all__ = [
    "A3Failure", "DecayReport", "LaplaceModel", "a3_constant", "brute_force_gibbs",
    "curie_weiss", "curie_weiss_constant", "fourier_decay_check", "gibbs_magnetization_pmf",
    "l1_distance", "limit_integral", "psi_transform", "quartic_integral", "strip_integral",
    "tilted_local_limit", "tilted_pmf",
]
