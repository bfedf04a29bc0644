"""Residues, zones of control, renormalization and local-limit estimators.

A :class:`ModPhiModel` describes a sequence ``X_n`` through its exact
characteristic function, the parameters ``t_n`` and a reference stable law.
The estimators here compare the finite-``n`` law of the renormalized
variable ``Y_n`` against the stable density, by exact summation over a
lattice pmf, by Parseval with band-limited sandwiches, by Fourier inversion
for absolutely continuous models, or by Monte Carlo with pre-split seeds.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .oracle.quadrature import certified_quadrature
from .pmf import ExactPmf
from .stable import StableLaw, levy_exponent
from .testfn import (FourierTestFunction, expectation_via_parseval,
                     sandwich_indicator)

MC_CHUNK = 10_000

# Constant C(c, alpha, nu) of the test-function bound, Gaussian reference, nu = 3.
# Frozen from calibrate_gap_constant() on the GAF model, Fejer kernel at the
# zone edge centred at 0.5.  Observed normalized gaps: 1.8e-2 (v = 100),
# 2.7e-2 (v = 300), 3.3e-2 (v = 1000), 3.6e-2 (v = 3000), creeping up to the
# Edgeworth value; small v gives far less because the kernel is wide.  The
# frozen value carries roughly a factor 2 of headroom.
GAP_CONSTANT = 0.08


class PreconditionError(ValueError):
    """Inputs violate the stated hypotheses of an estimator."""


class CapabilityError(ValueError):
    """A method was requested that the model cannot support."""


@dataclass(frozen=True)
class ZoneOfControl:
    """Zone ``|xi| <= K t^gamma`` on which ``|theta_n - 1| <= K1 |xi|^nu exp(K2 |xi|^omega)``."""

    K: float
    gamma: float
    nu: float
    omega: float
    K1: float
    K2: float = 0.0

    def violations(self, law: StableLaw) -> list[str]:
        """Conditions of the second kind that fail for ``law``; empty if none."""
        out = []
        a = law.alpha
        if not self.K > 0:
            out.append("K must be positive")
        if self.K1 < 0 or self.K2 < 0:
            out.append("K1 and K2 must be non-negative")
        if not self.nu > 0 or not self.omega > 0:
            out.append("nu and omega must be positive")
        if a > self.omega:
            out.append(f"alpha = {a} exceeds omega = {self.omega}")
        gmax = math.inf if self.omega == a else 1 / (self.omega - a)
        if not -1 / a < self.gamma <= gmax:
            out.append(f"gamma = {self.gamma} outside (-1/alpha, {gmax}]")
        if self.K2 > 0 and self.omega > a:
            kmax = (law.c**a / (2 * self.K2)) ** (1 / (self.omega - a))
            if self.K > kmax * (1 + 1e-12):
                out.append(f"K = {self.K} exceeds (c^alpha / 2 K2)^(1/(omega - alpha)) = {kmax}")
        return out

    def half_width(self, t: float) -> float:
        return self.K * t**self.gamma

    def envelope(self, xi):
        ax = np.abs(xi)
        return self.K1 * ax**self.nu * np.exp(self.K2 * ax**self.omega)


@dataclass(frozen=True, eq=False)
class ModPhiModel:
    """A sequence ``X_n`` with its reference stable law.

    ``charfn(n, xi)`` and the optional ``log_charfn`` take arrays of ``xi``;
    for two-dimensional models ``xi`` has a trailing axis of length 2.
    ``pmf(n)`` returns the :class:`ExactPmf` of ``X_n`` and
    ``sampler(n, rng, size)`` an array of draws of ``X_n``.
    """

    name: str
    law: StableLaw
    t: Callable[[Any], float]
    charfn: Callable | None = None
    log_charfn: Callable | None = None
    pmf: Callable | None = None
    sampler: Callable | None = None
    dimension: int = 1
    index_name: str = "n"
    default_indices: tuple = ()
    zone: Any = None
    continuous: bool = False
    mod_phi_convergent: bool | None = None
    l1_mod_phi: bool = False
    limiting_theta: Callable | None = None
    l1_tail_bound: Callable | None = None
    y_charfn_tail: Callable | None = None
    info: Mapping = field(default_factory=dict)

    def zone_of(self, n) -> ZoneOfControl | None:
        if self.zone is None or isinstance(self.zone, ZoneOfControl):
            return self.zone
        return self.zone(n)

    def log_cf(self, n, xi):
        if self.log_charfn is not None:
            return self.log_charfn(n, xi)
        if self.charfn is None:
            raise CapabilityError(f"model {self.name!r} has no characteristic function")
        with np.errstate(divide="ignore"):
            return np.log(self.charfn(n, xi).astype(complex))

    def cf(self, n, xi):
        if self.charfn is not None:
            return self.charfn(n, xi)
        return np.exp(self.log_cf(n, xi))


def _reference_exponent(model: ModPhiModel, xi):
    xi = np.asarray(xi, dtype=float)
    if model.dimension == 2:
        return levy_exponent(model.law, xi[..., 0]) + levy_exponent(model.law, xi[..., 1])
    return levy_exponent(model.law, xi)


def log_residue(model: ModPhiModel, n, xi):
    """``log charfn(n, xi) - t_n eta(i xi)``, never leaving log space."""
    return model.log_cf(n, xi) - model.t(n) * _reference_exponent(model, xi)


def residue(model: ModPhiModel, n, xi):
    """theta_n(xi) = charfn(n, xi) exp(-t_n eta(i xi)); exactly 1 at the origin."""
    xi = np.asarray(xi, dtype=float)
    out = np.exp(log_residue(model, n, xi))
    zero = np.all(xi == 0, axis=-1) if model.dimension == 2 else xi == 0
    return np.where(zero, 1.0 + 0j, out)


# --- zones --------------------------------------------------------------------

@dataclass
class ZoneRow:
    n: Any
    t_n: float
    half_width: float
    max_ratio: float
    argmax_xi: float
    passed: bool


@dataclass
class ZoneReport:
    model: str
    zone: ZoneOfControl
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self):
        return {"model": self.model, "zone": asdict(self.zone), "passed": self.passed,
                "rows": [asdict(r) for r in self.rows]}


def zone_grid(half_width: float, points=(512, 512)) -> np.ndarray:
    """Symmetric grid: geometric near zero plus uniform out to the edge."""
    n_geo, n_uni = points
    geo = np.geomspace(half_width * 1e-4, half_width, n_geo)
    uni = np.linspace(0, half_width, n_uni + 1)[1:]
    pos = np.unique(np.concatenate([geo, uni]))
    return np.concatenate([-pos[::-1], pos])


def verify_zone(model: ModPhiModel, indices, zone: ZoneOfControl | None = None,
                grid_points=(512, 512), roundoff: float = 1e-13) -> ZoneReport:
    """Check the zone bound on a grid for each index.

    The reported ratio is ``|theta_n(xi) - 1| / (K1 |xi|^nu exp(K2 |xi|^omega) + roundoff |xi|)``;
    an index passes when its maximum is at most ``1 + 1e-9``.  The last term
    accounts for the cancellation of the centring phase ``i xi E[X_n]`` in
    floating point, which leaves an absolute error linear in ``|xi|``.
    """
    if isinstance(grid_points, int):
        grid_points = (grid_points, grid_points)
    rows = []
    for n in indices:
        z = zone if zone is not None else model.zone_of(n)
        if z is None:
            raise PreconditionError(f"model {model.name!r} declares no zone of control")
        bad = z.violations(model.law)
        if bad:
            raise PreconditionError("; ".join(bad))
        t = model.t(n)
        L = z.half_width(t)
        xi = zone_grid(L, grid_points)
        if model.dimension == 2:
            pts = np.stack([xi, np.zeros_like(xi)], axis=-1)
            dev = np.abs(np.expm1(log_residue(model, n, pts)))
        else:
            dev = np.abs(np.expm1(log_residue(model, n, xi)))
        env = z.envelope(xi) + roundoff * np.abs(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(env > 0, dev / env, np.where(dev > 0, np.inf, 0.0))
        j = int(np.argmax(ratio))
        rows.append(ZoneRow(n, float(t), float(L), float(ratio[j]), float(xi[j]),
                            bool(ratio[j] <= 1 + 1e-9)))
    return ZoneReport(model.name, zone if zone is not None else model.zone_of(indices[0]), rows)


# --- renormalization ------------------------------------------------------------

def renormalization(model: ModPhiModel, n) -> tuple[float, float]:
    """``(slope, shift)`` with ``Y_n = slope * X_n + shift``."""
    t = model.t(n)
    law = model.law
    if law.alpha != 1:
        return t ** (-1 / law.alpha), 0.0
    return 1 / t, -2 * law.c * law.beta / math.pi * math.log(t)


def renormalize(model: ModPhiModel, n, x_value):
    """Map ``X_n`` to ``Y_n``; accepts numbers, arrays or an :class:`ExactPmf`."""
    slope, shift = renormalization(model, n)
    if isinstance(x_value, ExactPmf):
        return x_value.affine(slope, shift)
    if np.ndim(x_value):
        return slope * np.asarray(x_value, dtype=float) + shift
    return slope * x_value + shift


def y_charfn(model: ModPhiModel, n) -> Callable:
    """Characteristic function of ``Y_n``."""
    slope, shift = renormalization(model, n)

    def cf(xi):
        xi = np.asarray(xi, dtype=float)
        phase = xi.sum(axis=-1) if model.dimension == 2 else xi
        return model.cf(n, slope * xi) * np.exp(1j * shift * phase)
    return cf


# --- local limits ---------------------------------------------------------------

REPORT_FIELDS = ("model", "n", "delta", "x", "window", "lhs", "target",
                 "abs_err", "rel_err", "method", "seed")


@dataclass
class LocalLimitReport:
    model: str
    n: Any
    delta: float | None
    x: Any
    window: list
    lhs: float
    target: float
    method: str
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.target)

    @property
    def rel_err(self) -> float:
        return (self.lhs - self.target) / self.target if self.target else math.inf

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in REPORT_FIELDS}
        out["x"] = list(self.x) if isinstance(self.x, (tuple, list)) else self.x
        out["details"] = dict(self.details)
        return out


def _intervals(B) -> list[tuple[float, float]]:
    if len(B) == 2 and all(np.isscalar(v) for v in B):
        B = [B]
    out = [(float(a), float(b)) for a, b in B]
    for a, b in out:
        if not a < b:
            raise ValueError(f"empty interval ({a}, {b})")
    return sorted(out)


def _measure(ivs) -> float:
    return math.fsum(b - a for a, b in ivs)


def mc_workers() -> int:
    try:
        return max(1, int(os.environ.get("MODPHI_THREADS", "1")))
    except ValueError:
        return 1


def monte_carlo_counts(draw, count, budget: int, seed: int, chunk: int = MC_CHUNK):
    """Sum of ``count(draw(rng, size))`` over fixed-size chunks.

    Every chunk has its own child seed of ``SeedSequence(seed)``, so the
    total does not depend on how many workers run the chunks.
    """
    sizes = [chunk] * (budget // chunk) + ([budget % chunk] if budget % chunk else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(j):
        rng = np.random.default_rng(streams[j])
        return count(draw(rng, sizes[j]))

    with ThreadPoolExecutor(max_workers=mc_workers()) as pool:
        parts = list(pool.map(work, range(len(sizes))))
    return sum(parts[1:], parts[0])


def _target_1d(model, x, ivs):
    return float(model.law.density(float(x))) * _measure(ivs)


def _exact_window_mass(pmf_y: ExactPmf, x, s, ivs):
    return math.fsum(pmf_y.interval_mass(x + a / s, x + b / s) for a, b in ivs)


def _parseval_bracket(model, n, x, s, ivs, eta):
    g1, g2 = sandwich_indicator(ivs, eta)
    cf = y_charfn(model, n)
    lo = expectation_via_parseval(g1.rescaled(s, x), cf, scale=10 + abs(x))
    hi = expectation_via_parseval(g2.rescaled(s, x), cf, scale=10 + abs(x))
    return lo, hi


def local_limit_estimate(model: ModPhiModel, n, x, B, delta: float, method: str = "exact",
                         mc_budget: int = 100_000, seed: int = 0, eta: float | None = None
                         ) -> LocalLimitReport:
    """Estimate ``t_n^delta P[Y_n - x in t_n^{-delta} B]`` against ``p(x) m(B)``.

    Parameters
    ----------
    B : interval or list of intervals
        Windows are half-open, ``(a, b]``, for lattice laws.  For
        two-dimensional models ``B`` is a rectangle ``((a1, b1), (a2, b2))`` and
        ``x`` a pair; the scale factor becomes ``t_n^(2 delta)``.
    method : {'exact', 'parseval', 'montecarlo'}
        ``parseval`` reports the midpoint of the sandwich bracket, with the
        bracket itself in ``details``.
    eta : float, optional
        Sandwich gap for ``parseval``, default ``m(B)/10``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    s = model.t(n) ** delta
    return _window_estimate(model, n, x, B, s, method, mc_budget, seed, eta, delta)


def strong_local_limit(model: ModPhiModel, n, x, B, s_n: float, method: str = "fourier",
                       mc_budget: int = 100_000, seed: int = 0, eta: float | None = None
                       ) -> LocalLimitReport:
    """``s_n P[Y_n - x in B / s_n]`` for an arbitrary scale ``s_n``.

    Intended for models with L1 residue convergence, where no relation
    between ``s_n`` and ``t_n`` is needed.
    """
    if not s_n > 0:
        raise ValueError("scale must be positive")
    rep = _window_estimate(model, n, x, B, s_n, method, mc_budget, seed, eta, None)
    rep.details["scale"] = float(s_n)
    if not model.l1_mod_phi:
        rep.details["warning"] = "model not flagged as L1 mod-phi convergent"
    return rep


def _window_estimate(model, n, x, B, s, method, mc_budget, seed, eta, delta):
    if model.dimension == 2:
        return _window_estimate_2d(model, n, x, B, s, method, mc_budget, seed, delta)
    ivs = _intervals(B)
    x = float(x)
    details: dict = {}
    if method == "exact":
        if model.pmf is None:
            raise CapabilityError(f"model {model.name!r} has no exact pmf")
        pmf_y = renormalize(model, n, model.pmf(n))
        lhs = s * _exact_window_mass(pmf_y, x, s, ivs)
        used_seed = None
    elif method == "parseval":
        if model.charfn is None and model.log_charfn is None:
            raise CapabilityError(f"model {model.name!r} has no characteristic function")
        gap = eta if eta is not None else _measure(ivs) / 10
        lo, hi = _parseval_bracket(model, n, x, s, ivs, gap)
        details.update(lower=s * lo, upper=s * hi, eta=gap)
        lhs = 0.5 * s * (lo + hi)
        used_seed = None
    elif method == "fourier":
        if not model.continuous:
            raise CapabilityError("Fourier interval inversion needs an absolutely continuous law")
        lhs, err = _fourier_window(model, n, x, s, ivs)
        details["quadrature_error"] = s * err
        used_seed = None
    elif method == "montecarlo":
        if model.sampler is None:
            raise CapabilityError(f"model {model.name!r} has no sampler")
        slope, shift = renormalization(model, n)

        def draw(rng, size):
            return slope * model.sampler(n, rng, size) + shift

        def count(y):
            z = (y - x) * s
            return int(sum(np.count_nonzero((z > a) & (z <= b)) for a, b in ivs))

        hits = monte_carlo_counts(draw, count, mc_budget, seed)
        p = hits / mc_budget
        lhs = s * p
        details.update(hits=hits, samples=mc_budget, stderr=s * math.sqrt(p * (1 - p) / mc_budget))
        used_seed = seed
    else:
        raise CapabilityError(f"unknown method {method!r}")
    return LocalLimitReport(model.name, n, delta, x, [list(iv) for iv in ivs], float(lhs),
                            _target_1d(model, x, ivs), method, used_seed, details)


def _fourier_window(model, n, x, s, ivs, xi_max: float = 40.0):
    """s * P[Y - x in B/s] by inverting the characteristic function of ``Y``."""
    cf = y_charfn(model, n)
    bounds = [(x + a / s, x + b / s) for a, b in ivs]

    def integrand(xi):
        xi_arr = np.array([xi])
        phi = cf(xi_arr)[0]
        total = 0.0
        for u, v in bounds:
            if xi == 0:
                total += v - u
            else:
                total += np.real(phi * (np.exp(-1j * u * xi) - np.exp(-1j * v * xi)) / (1j * xi))
        return total / math.pi

    tail = 0.0
    if model.y_charfn_tail is not None:
        tail = model.y_charfn_tail(n, xi_max) * math.fsum(v - u for u, v in bounds) / math.pi
    spread = max(max(abs(u), abs(v)) for u, v in bounds) + 1.0
    res = certified_quadrature(integrand, 0.0, xi_max, tol=1e-13, period=2 * math.pi / spread,
                               tail_bound=tail)
    return s * float(res.value), res.error_bound


def _rectangle(B):
    (a1, b1), (a2, b2) = B
    if not (a1 < b1 and a2 < b2):
        raise ValueError("degenerate rectangle")
    return (float(a1), float(b1)), (float(a2), float(b2))


def _window_estimate_2d(model, n, x, B, s, method, mc_budget, seed, delta):
    (a1, b1), (a2, b2) = _rectangle(B)
    x1, x2 = (float(v) for v in x)
    area = (b1 - a1) * (b2 - a2)
    # standard reference in each coordinate after renormalization
    target = float(model.law.density(x1) * model.law.density(x2)) * area
    details: dict = {}
    if method == "montecarlo":
        if model.sampler is None:
            raise CapabilityError(f"model {model.name!r} has no sampler")
        slope, shift = renormalization(model, n)

        def draw(rng, size):
            return slope * model.sampler(n, rng, size) + shift

        def count(y):
            z1 = (y[:, 0] - x1) * s
            z2 = (y[:, 1] - x2) * s
            return int(np.count_nonzero((z1 > a1) & (z1 <= b1) & (z2 > a2) & (z2 <= b2)))

        hits = monte_carlo_counts(draw, count, mc_budget, seed)
        p = hits / mc_budget
        lhs = s * s * p
        details.update(hits=hits, samples=mc_budget, stderr=s * s * math.sqrt(p * (1 - p) / mc_budget))
        used_seed = seed
    elif method == "parseval":
        lo, hi = _parseval_bracket_2d(model, n, (x1, x2), s, ((a1, b1), (a2, b2)))
        details.update(lower=s * s * lo, upper=s * s * hi)
        lhs = 0.5 * s * s * (lo + hi)
        used_seed = None
    else:
        raise CapabilityError(f"method {method!r} unsupported in dimension 2")
    return LocalLimitReport(model.name, n, delta, [x1, x2], [[a1, b1], [a2, b2]], float(lhs),
                            target, method, used_seed, details)


def _parseval_bracket_2d(model, n, x, s, rect, eta_frac: float = 0.1, nodes: int = 160):
    """Sandwich a rectangle by products of one-dimensional Selberg functions.

    With ``l <= 1 <= u`` in each coordinate and ``u >= 0``,
    ``u1 l2 + l1 u2 - u1 u2 <= 1_R <= u1 u2``.  The two-dimensional Parseval
    integral is computed with a tensor Gauss-Legendre rule.
    """
    cf = y_charfn(model, n)
    fs = []
    for (a, b), c in zip(rect, x):
        g1, g2 = sandwich_indicator([(a, b)], eta_frac * (b - a))
        fs.append((g1.rescaled(s, c), g2.rescaled(s, c)))
    K = max(fs[0][1].K, fs[1][1].K)
    u, w = np.polynomial.legendre.leggauss(nodes)
    xi = K * u
    wt = K * w
    X1, X2 = np.meshgrid(xi, xi, indexing="ij")
    phi = np.conj(cf(np.stack([X1, X2], axis=-1)))
    W = np.outer(wt, wt) / (4 * np.pi**2)

    def pair(f, g):
        F = np.outer(f.fourier(xi), g.fourier(xi))
        return float(np.real(np.sum(W * F * phi)))

    (l1, u1), (l2, u2) = fs
    upper = pair(u1, u2)
    lower = pair(u1, l2) + pair(l1, u2) - upper
    return lower, upper


# --- test-function gap --------------------------------------------------------------

@dataclass
class GapReport:
    gap: float
    bound: float
    model_expectation: float
    law_expectation: float

    @property
    def within(self) -> bool:
        return self.gap <= self.bound


def test_function_gap(model: ModPhiModel, n, f: FourierTestFunction,
                      zone: ZoneOfControl | None = None, constant: float = GAP_CONSTANT) -> GapReport:
    """``|E f(Y_n) - int f dphi|`` and the bound ``C K1 ||f||_1 / t_n^(nu/alpha)``.

    ``f`` acts on the renormalized variable and must have band limit at most
    ``K t_n^(gamma + 1/alpha)``.
    """
    zone = zone if zone is not None else model.zone_of(n)
    if zone is None:
        raise PreconditionError(f"model {model.name!r} declares no zone of control")
    t = model.t(n)
    a = model.law.alpha
    limit = zone.K * t ** (zone.gamma + 1 / a)
    if f.K > limit * (1 + 1e-12):
        raise PreconditionError(f"support bound {f.K} exceeds K t^(gamma + 1/alpha) = {limit}")
    if f.K == 0:
        return GapReport(0.0, 0.0, 0.0, 0.0)
    e_model = expectation_via_parseval(f, y_charfn(model, n), tol=1e-12)
    e_law = expectation_via_parseval(f, model.law.charfn, tol=1e-12)
    bound = constant * zone.K1 * f.l1_norm / t ** (zone.nu / a)
    return GapReport(abs(e_model - e_law), bound, e_model, e_law)


test_function_gap.__test__ = False


def calibrate_gap_constant(model: ModPhiModel, indices, center: float = 0.5) -> float:
    """Largest ``gap t^(nu/alpha) / (K1 ||f||_1)`` over ``indices``.

    The test function is a Fejer kernel at ``center`` with the widest band
    the zone allows.
    """
    from .testfn import fejer

    worst = 0.0
    for n in indices:
        z = model.zone_of(n)
        t = model.t(n)
        f = fejer(z.K * t ** (z.gamma + 1 / model.law.alpha), center)
        rep = test_function_gap(model, n, f, z, constant=1.0)
        worst = max(worst, rep.gap / rep.bound)
    return worst


# --- L1 residue distance ------------------------------------------------------------

@dataclass
class L1Distance:
    value: float
    quadrature_error: float
    tail_bound: float
    integration_bound: float

    @property
    def upper(self) -> float:
        return self.value + self.quadrature_error + self.tail_bound


def l1_residue_distance(model: ModPhiModel, n, limiting_theta: Callable | None = None,
                        integration_bound: float = 60.0, tail_bound: float | None = None
                        ) -> L1Distance:
    """``||theta_n - theta||_1`` over ``[-Xi, Xi]`` plus a tail bound for the rest.

    Both residues are assumed conjugate-symmetric, so the integral is folded
    onto ``[0, Xi]``.  Without an explicit ``tail_bound`` the model's own
    ``l1_tail_bound(n, Xi)`` is used.
    """
    theta = limiting_theta or model.limiting_theta
    if theta is None:
        raise PreconditionError("no limiting residue supplied")
    if tail_bound is None:
        tail_bound = model.l1_tail_bound(n, integration_bound) if model.l1_tail_bound else 0.0

    def integrand(xi):
        arr = np.array([xi])
        return 2.0 * float(np.abs(residue(model, n, arr)[0] - theta(arr)[0]))

    res = certified_quadrature(integrand, 0.0, integration_bound, tol=1e-15, rtol=1e-9,
                               points=[1.0, 2.0, 4.0, 8.0])
    return L1Distance(float(res.value), res.error_bound, float(tail_bound), integration_bound)


# --- Kolmogorov distance ------------------------------------------------------------

def kolmogorov_distance(model: ModPhiModel, n, cdf_grid=None, method: str = "exact",
                        mc_budget: int = 100_000, seed: int = 0) -> float:
    """``sup |F_{Y_n} - F_law|`` over a grid.

    With an exact pmf and no grid, the supremum is taken over the atoms of
    ``Y_n`` within eight units of the origin, using both one-sided limits of
    the step function; this is the exact supremum over that range.
    """
    if method == "exact":
        if model.pmf is None:
            raise CapabilityError(f"model {model.name!r} has no exact pmf")
        pmf_y = renormalize(model, n, model.pmf(n))
        if cdf_grid is None:
            ys = pmf_y.support
            keep = np.abs(ys) <= 8
            ys = ys[keep]
            right = np.cumsum(pmf_y.probs)[keep]
            left = right - pmf_y.probs[keep]
            F = _law_cdf(model.law, ys)
            return float(max(np.max(np.abs(right - F)), np.max(np.abs(left - F))))
        grid = np.asarray(cdf_grid, dtype=float)
        return float(np.max(np.abs(pmf_y.cdf(grid) - _law_cdf(model.law, grid))))
    if method == "montecarlo":
        if model.sampler is None:
            raise CapabilityError(f"model {model.name!r} has no sampler")
        slope, shift = renormalization(model, n)
        rng = np.random.default_rng(seed)
        y = np.sort(slope * model.sampler(n, rng, mc_budget) + shift)
        grid = np.linspace(-5, 5, 1001) if cdf_grid is None else np.asarray(cdf_grid, dtype=float)
        ecdf = np.searchsorted(y, grid, side="right") / y.size
        return float(np.max(np.abs(ecdf - _law_cdf(model.law, grid))))
    raise CapabilityError(f"unknown method {method!r}")


def _law_cdf(law: StableLaw, x):
    if law.alpha == 2 and law.beta == 0:
        from scipy.special import ndtr
        return ndtr(np.asarray(x) / (math.sqrt(2) * law.c))
    return law.cdf(x)


# --- cumulant zones -----------------------------------------------------------------

@dataclass(frozen=True)
class CumulantZone:
    t_n: float
    delta_range: tuple
    scale_base: float
    A: float

    def scale(self, delta: float) -> float:
        """Window scale ``(Var^(3/2) / (N D^2))^delta`` for ``delta`` in (0, 1)."""
        return self.scale_base**delta


def cumulant_zone(variance: float, N_n: float, D_n: float, A: float = 1.0) -> CumulantZone:
    """``t_n = Var / (N^(2/3) D^(4/3))`` for sums with uniform cumulant bounds."""
    if min(variance, N_n, D_n) <= 0:
        raise ValueError("variance, N_n and D_n must be positive")
    if D_n > N_n:
        raise ValueError(f"D_n = {D_n} exceeds N_n = {N_n}")
    t = variance / (N_n ** (2 / 3) * D_n ** (4 / 3))
    return CumulantZone(float(t), (0.0, 1.0), variance**1.5 / (N_n * D_n**2), float(A))
