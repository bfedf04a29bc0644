"""The model zoo.

Every constructor returns a :class:`~modlab.modphi.ModPhiModel` describing a
*family* indexed by its natural size parameter: ``q`` for random partitions,
``R^2`` for the zeros of the planar Gaussian analytic function, the prime
cutoff for the random zeta values, time for the winding angle and ``n``
elsewhere.  The constructor itself only takes hyperparameters (a transition
matrix, an edge probability, ...).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import digamma, gammaln, loggamma, polygamma, rgamma

from .modphi import ModPhiModel, ZoneOfControl, cumulant_zone
from .oracle import pmfs
from .oracle.special import hyp2f1_c1
from .stable import StableLaw

TRUNCATION_TAIL = 1e-12
GAUSSIAN = StableLaw.gaussian()

__all__ = [
    "MODEL_REGISTRY", "TruncationError", "bernoulli_cubic_constant", "brownian_winding",
    "determinantal_counts", "gaf_zeros", "gaf_zeros_hyperbolic", "gue_logdet", "iid_sum",
    "laguerre_logdet", "markov_visits", "partition_size", "plane_partition_size",
    "random_zeta", "subgraph_count", "winding_l1_bound", "zeta_zone_check",
]


class TruncationError(ArithmeticError):
    """A truncated product or series is not accurate enough."""


def _log1p_complex(re, im):
    """log(1 + w) for w = re + i im, accurate when |w| is tiny."""
    return 0.5 * np.log1p(2 * re + re * re + im * im) + 1j * np.arctan2(im, 1 + re)


def _chunked(fn, xi, width, budget=2**22):
    """Apply ``fn`` to slices of a flat ``xi`` so that intermediates stay bounded."""
    xi = np.asarray(xi, dtype=float)
    flat = xi.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, budget // max(width, 1))
    for s in range(0, flat.size, step):
        out[s:s + step] = fn(flat[s:s + step])
    return out.reshape(xi.shape)


# --- Bernoulli sums -------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_cubic_constant(c: float | None = None, grid: int = 400) -> tuple[float, float]:
    """Constants ``(c, A)`` for the cubic bound on Bernoulli log-characteristic functions.

    ``c`` solves ``sum_{n>=3} c^(n-3)/n = 1/2``; ``A`` is the supremum over
    ``p`` in (0, 1] and ``0 < |u| <= c`` of
    ``|log(1 + p(e^{iu} - 1)) - i p u + p(1-p)u^2/2| / (p |u|^3)``,
    evaluated on a grid and inflated by 2% to cover the gaps.
    """
    if c is None:
        def excess(x):
            n = np.arange(3, 4000)
            return np.sum(x ** (n - 3) / n) - 0.5
        lo, hi = 0.0, 0.99
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if excess(mid) < 0 else (lo, mid)
        c = lo
    p = np.unique(np.concatenate([np.geomspace(1e-6, 1, grid), np.linspace(0.001, 1, grid)]))
    u = np.linspace(c / grid, c, grid)
    P, U = np.meshgrid(p, u, indexing="ij")
    logcf = _log1p_complex(-2 * P * np.sin(U / 2) ** 2, P * np.sin(U))
    rem = logcf - 1j * P * U + P * (1 - P) * U**2 / 2
    A = float(np.max(np.abs(rem) / (P * U**3)))
    return float(c), 1.02 * A


def _bernoulli_family(name, probs_of, index_name, default_indices, info=None, degenerate_ok=False):
    """Shared machinery for counts that are sums of independent Bernoulli variables."""

    @lru_cache(maxsize=64)
    def stats(n):
        p = np.asarray(probs_of(n), dtype=float)
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise ValueError("Bernoulli parameters must lie in [0, 1]")
        m = math.fsum(p)
        v = math.fsum(p * (1 - p))
        if v <= 0 and not degenerate_ok:
            raise ValueError("degenerate count: zero variance")
        return p, m, v

    def t(n):
        return stats(n)[2] ** (1 / 3)

    def log_charfn(n, xi):
        p, m, v = stats(n)
        a = v ** (-1 / 3)

        def block(x):
            z = a * x[:, None]
            terms = _log1p_complex(-2 * p * np.sin(z / 2) ** 2, p * np.sin(z))
            return terms.sum(axis=1) - 1j * a * m * x
        return _chunked(block, xi, p.size)

    @lru_cache(maxsize=16)
    def pmf(n):
        p, m, v = stats(n)
        a = v ** (-1 / 3)
        return pmfs.poisson_binomial(p).affine(a, -a * m)

    def sampler(n, rng, size):
        p, m, v = stats(n)
        counts = np.zeros(size)
        for s in range(0, size, 2000):
            k = min(2000, size - s)
            counts[s:s + k] = (rng.random((k, p.size)) < p).sum(axis=1)
        return (counts - m) / v ** (1 / 3)

    c, A = bernoulli_cubic_constant()

    def zone(n):
        p, m, v = stats(n)
        ratio = m / v                      # r/(r-1) with r = m/(m - v)
        K1 = 2 * A * ratio
        return ZoneOfControl(K=min(c, 1 / (4 * K1)), gamma=1.0, nu=3.0, omega=3.0, K1=K1, K2=K1)

    extra = {"cubic_constant": A, "cubic_radius": c, **(info or {})}
    model = ModPhiModel(
        name=name, law=GAUSSIAN, t=t, log_charfn=log_charfn,
        charfn=lambda n, xi: np.exp(log_charfn(n, xi)), pmf=pmf, sampler=sampler,
        index_name=index_name, default_indices=tuple(default_indices), zone=zone,
        mod_phi_convergent=False, info=extra,
    )
    object.__setattr__(model, "stats", stats)
    return model


def gaf_zeros() -> ModPhiModel:
    """Number of zeros of the planar hyperbolic GAF in the disc of radius ``R``.

    Indexed by ``r2 = R^2``.  In law the count is a sum of independent
    Bernoulli(R^(2k)), so ``m = R^2/(1 - R^2)`` and ``v = R^2/(1 - R^4)``.
    ``X = (Z - m)/v^(1/3)`` with ``t = v^(1/3)``.
    """
    def probs(r2):
        if not 0 < r2 < 1:
            raise ValueError("R^2 must lie in (0, 1)")
        kmax = int(math.ceil(math.log(1e-15) / math.log(r2)))
        p = r2 ** np.arange(1, kmax + 1)
        m = r2 / (1 - r2)
        if abs(math.fsum(p) - m) > 1e-12 * max(1.0, m):
            raise TruncationError("Bernoulli product truncated too early")
        return p

    return _bernoulli_family("gaf", probs, "r2", (0.5, 0.9, 0.95, 0.98),
                             {"mean": "R^2/(1-R^2)", "variance": "R^2/(1-R^4)"})


def gaf_moments(r2: float) -> dict:
    m = r2 / (1 - r2)
    v = r2 / (1 - r2 * r2)
    return {"m": m, "v": v, "r": m / (m - v)}


def hyperbolic_area(r2: float) -> float:
    """h = 4 pi R^2 / (1 - R^2)."""
    return 4 * math.pi * r2 / (1 - r2)


def radius_from_area(h: float) -> float:
    """Inverse of :func:`hyperbolic_area`, returning ``R^2``."""
    return h / (4 * math.pi + h)


def gaf_zeros_hyperbolic() -> ModPhiModel:
    """Same count indexed by the hyperbolic area ``h`` of the disc."""
    base = gaf_zeros()
    stats = base.stats
    model = ModPhiModel(
        name="gaf_hyperbolic", law=base.law, t=lambda h: base.t(radius_from_area(h)),
        log_charfn=lambda h, xi: base.log_charfn(radius_from_area(h), xi),
        charfn=lambda h, xi: base.charfn(radius_from_area(h), xi),
        pmf=lambda h: base.pmf(radius_from_area(h)),
        sampler=lambda h, rng, size: base.sampler(radius_from_area(h), rng, size),
        index_name="h", default_indices=(4 * math.pi, 40.0, 400.0),
        zone=lambda h: base.zone_of(radius_from_area(h)), mod_phi_convergent=False,
        info=dict(base.info),
    )
    object.__setattr__(model, "stats", lambda h: stats(radius_from_area(h)))
    return model


def determinantal_counts(eigenvalues) -> ModPhiModel:
    """Counts of a determinantal process from the eigenvalues of its kernel.

    ``eigenvalues`` is a callable ``n -> array``, a list indexed by ``n``, or
    a single array (then every index refers to it).  Degenerate lists with
    zero variance are accepted; their ``r_n`` is reported as undefined.
    """
    if callable(eigenvalues):
        probs_of = eigenvalues
        default = ()
    else:
        arr = list(eigenvalues)
        if arr and np.ndim(arr[0]) == 0:
            single = np.asarray(arr, dtype=float)
            probs_of = lambda n: single
            default = (0,)
        else:
            probs_of = lambda n: np.asarray(arr[n], dtype=float)
            default = tuple(range(len(arr)))
    for n in default:
        p = np.asarray(probs_of(n), dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ValueError("eigenvalues must lie in [0, 1]")
    return _bernoulli_family("determinantal", probs_of, "n", default, degenerate_ok=True)


def determinantal_summary(model: ModPhiModel, n) -> dict:
    p, m, v = model.stats(n)
    degenerate = v == 0 or m == v
    return {"m": m, "v": v, "r": None if degenerate else m / (m - v), "degenerate": bool(v == 0)}


# --- random partitions ------------------------------------------------------------

def _partition_series(q, weight_power, N):
    n = np.arange(1, N + 1, dtype=float)
    qn = q**n
    w = n**weight_power
    mean = math.fsum(w * n * qn / (1 - qn))
    var = math.fsum(w * n**2 * qn / (1 - qn) ** 2)
    third = math.fsum(w * n**3 * (qn + qn * qn) / (1 - qn) ** 3)
    return mean, var, third


def _truncation_order(q, weight_power):
    # smallest N with the tail of n^(w+1) q^n / (1 - q^n) below the target
    n = 1
    while True:
        tail = n ** (weight_power + 1) * q**n / ((1 - q) ** (weight_power + 3))
        if tail < TRUNCATION_TAIL:
            return n
        n += max(1, n // 20)


def _check_truncation(q, N, weight_power):
    tail = (N + 1) ** (weight_power + 1) * q ** (N + 1) / ((1 - q) ** (weight_power + 3))
    if tail >= TRUNCATION_TAIL:
        raise TruncationError(f"truncation N = {N} leaves tail bound {tail:.2e} at q = {q}")


def _partition_family(name, weight_power, exponent, t_power, pmf_fn, N_trunc, default_q):
    """Common code for weighted sums of independent geometric variables.

    The statistic is ``S = sum_n n^(w+1) G_n`` with ``G_n`` geometric of
    parameter ``q^n`` (``n^w`` independent copies folded into the weight).
    """

    @lru_cache(maxsize=64)
    def series(q):
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        N = N_trunc if N_trunc is not None else _truncation_order(q, weight_power)
        _check_truncation(q, N, weight_power)
        mean, var, third = _partition_series(q, weight_power, N)
        return N, mean, var, third

    def t(q):
        return series(q)[2] ** t_power

    def log_charfn(q, xi):
        N, mean, var, _ = series(q)
        a = var ** (-exponent)
        n = np.arange(1, N + 1, dtype=float)
        qn = q**n
        w = n**weight_power

        def block(x):
            z = a * x[:, None] * n
            # log((1 - q^n) / (1 - q^n e^{i n z})) = -log1p(-q^n (e^{i n z} - 1)/(1 - q^n))
            re = 2 * qn * np.sin(z / 2) ** 2 / (1 - qn)
            im = -qn * np.sin(z) / (1 - qn)
            return -(w * _log1p_complex(re, im)).sum(axis=1) - 1j * a * mean * x
        return _chunked(block, xi, N)

    @lru_cache(maxsize=8)
    def pmf(q):
        N, mean, var, _ = series(q)
        a = var ** (-exponent)
        return pmf_fn(q).affine(a, -a * mean)

    def zone(q):
        N, mean, var, third = series(q)
        C = third / (6 * var ** (3 * exponent))
        return ZoneOfControl(K=1 / (4 * C), gamma=1.0, nu=3.0, omega=3.0, K1=C, K2=C)

    model = ModPhiModel(
        name=name, law=GAUSSIAN, t=t, log_charfn=log_charfn,
        charfn=lambda q, xi: np.exp(log_charfn(q, xi)), pmf=pmf, index_name="q",
        default_indices=default_q, zone=zone, mod_phi_convergent=False,
    )
    object.__setattr__(model, "series", series)
    return model


def partition_size(N_trunc: int | None = None) -> ModPhiModel:
    """Size of a random integer partition, P[lambda] proportional to q^|lambda|.

    ``X_q = (S_q - M_q)/V_q^(4/9)`` with ``t_q = V_q^(1/9)``.  The product
    defining the characteristic function is truncated at ``N_trunc``
    (automatic by default) and the truncation is checked against the tail
    bound ``1e-12`` for every ``q`` it is used with.
    """
    return _partition_family("partition", 0, 4 / 9, 1 / 9, pmfs.euler_partition_pmf,
                             N_trunc, (0.5, 0.9, 0.95, 0.98))


def plane_partition_size(N_trunc: int | None = None) -> ModPhiModel:
    """Size of a random plane partition, weights from MacMahon's product.

    ``X'_q = (S'_q - M'_q)/V'_q^(5/12)`` and ``t_q = Var(X'_q) = V'_q^(1/6)``.
    """
    return _partition_family("plane_partition", 1, 5 / 12, 1 / 6, pmfs.macmahon_pmf,
                             N_trunc, (0.5, 0.8, 0.9))


def partition_moment_expansion(q: float) -> float:
    """zeta(2)/(log q)^2 + 1/(2 log q) + 1/24, the expansion of M_q."""
    L = math.log(q)
    return (math.pi**2 / 6) / L**2 + 1 / (2 * L) + 1 / 24


# --- random zeta values -------------------------------------------------------------

def random_zeta() -> ModPhiModel:
    """Two-dimensional model ``X = -sum_{p <= N} log(1 - U_p/sqrt(p))``.

    Indexed by the prime cutoff ``N``.  Coordinates are ``(Re X, Im X)``;
    ``t_N = (1/2) sum_{p<=N} 1/p`` and the reference law is the standard
    Gaussian in each coordinate, so ``Y = X/sqrt(t_N)``.  The complex
    normalization ``Z = X/sqrt(2 t_N)`` has limiting density ``e^{-|z|^2}/pi``.
    """

    @lru_cache(maxsize=32)
    def primes(N):
        if N < 2:
            raise ValueError("prime cutoff must be at least 2")
        return pmfs.prime_sieve(int(N))

    def t(N):
        return 0.5 * math.fsum(1.0 / primes(N))

    def charfn(N, xi):
        xi = np.asarray(xi, dtype=float)
        x1, x2 = xi[..., 0], xi[..., 1]
        a = (1j * x1 + x2) / 2
        b = (1j * x1 - x2) / 2
        out = np.ones(x1.shape, dtype=complex)
        for p in primes(N):
            out = out * hyp2f1_c1(a, b, 1.0 / p)
        return out

    def sampler(N, rng, size):
        ps = primes(N).astype(float)
        out = np.zeros((size, 2))
        for s in range(0, size, 1000):
            k = min(1000, size - s)
            u = np.exp(2j * np.pi * rng.random((k, ps.size)))
            x = -np.log1p(-u / np.sqrt(ps)).sum(axis=1)
            out[s:s + k, 0] = x.real
            out[s:s + k, 1] = x.imag
        return out

    model = ModPhiModel(
        name="zeta2d", law=GAUSSIAN, t=t, charfn=charfn, sampler=sampler, dimension=2,
        index_name="N", default_indices=(100, 1000, 10_000), mod_phi_convergent=True,
    )
    object.__setattr__(model, "primes", primes)
    return model


def zeta_zone_bound(primes, xi) -> tuple[np.ndarray, np.ndarray]:
    """``S = sum_p 16 |xi|^2 (|xi| + 2)^2 / p^2`` and its envelope ``8 |xi|^2 (|xi| + 2)^2``."""
    r = np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)
    base = r**2 * (r + 2) ** 2
    return 16 * base * math.fsum(1.0 / np.asarray(primes, dtype=float) ** 2), 8 * base


def zeta_zone_check(model: ModPhiModel, N: int, radius: float = 5.0,
                    radii: int = 80, angles: int = 16) -> dict:
    """Check ``|theta_N(xi) - 1| <= S e^S`` on a polar grid of ``||xi|| <= radius``."""
    from .modphi import log_residue

    r = np.geomspace(1e-3, radius, radii)
    phi = np.linspace(0, np.pi, angles, endpoint=False)
    R, P = np.meshgrid(r, phi, indexing="ij")
    pts = np.stack([R * np.cos(P), R * np.sin(P)], axis=-1)
    dev = np.abs(np.expm1(log_residue(model, N, pts)))
    S, envelope = zeta_zone_bound(model.primes(N), pts)
    with np.errstate(over="ignore"):
        ratio = dev / (S * np.exp(S))
    j = np.unravel_index(np.argmax(ratio), ratio.shape)
    return {"N": int(N), "max_ratio": float(ratio[j]), "argmax_norm": float(R[j]),
            "S_le_envelope": bool(np.all(S <= envelope)), "passed": bool(ratio[j] <= 1 + 1e-9)}


# --- Markov chains ----------------------------------------------------------------

def _check_chain(P):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1)) > 1e-12:
        raise ValueError("transition matrix must be row-stochastic")
    M = P.shape[0]
    B = (P > 0).astype(np.int64)
    reach = np.linalg.matrix_power(np.eye(M, dtype=np.int64) + B, M - 1) > 0
    if not reach.all():
        raise ValueError("transition matrix is reducible")
    # primitive iff some power up to (M-1)^2 + 1 is entrywise positive
    if not (np.linalg.matrix_power(B, (M - 1) ** 2 + 1) > 0).all():
        raise ValueError("transition matrix is periodic")
    return P


def markov_visits(P, a: int = 0) -> ModPhiModel:
    """Number of visits ``N_{n,a}`` to state ``a`` at times ``1..n``, stationary start.

    ``X_n = (N_{n,a} - n pi(a)) / (n^(1/3) D^(2/3))`` and
    ``t_n = Var(N_{n,a}) / (n^(2/3) D^(4/3))`` with ``D = (1 + theta)/(1 - theta)``,
    where ``theta^2`` is the second eigenvalue of the multiplicative
    reversiblization of ``P``.
    """
    P = _check_chain(P)
    M = P.shape[0]
    if not 0 <= a < M:
        raise ValueError("target state out of range")
    pi = pmfs.stationary_distribution(P)
    Ptilde = (P.T * pi[None, :]) / pi[:, None]
    ev = np.sort(np.real(np.linalg.eigvals(P @ Ptilde)))[::-1]
    theta = math.sqrt(max(ev[1], 0.0)) if M > 1 else 0.0
    D = (1 + theta) / (1 - theta)

    @lru_cache(maxsize=64)
    def variance(n):
        # Var = n g0 + 2 sum_k (n - k) g_k with g_k = pi_a (P^k[a, a] - pi_a)
        total = n * pi[a] * (1 - pi[a])
        row = np.zeros(M)
        row[a] = 1.0
        for k in range(1, n):
            row = row @ P
            g = pi[a] * (row[a] - pi[a])
            total += 2 * (n - k) * g
            if abs(g) * n < 1e-18 * total:
                break
        return total

    def t(n):
        return cumulant_zone(variance(n), n, D, 1.0).t_n

    def scale(n):
        return n ** (1 / 3) * D ** (2 / 3)

    def log_charfn(n, xi):
        # pi D(z) (P D(z))^(n-1) 1; every entry of P D(z) has modulus <= P, so no overflow
        xi = np.asarray(xi, dtype=float)
        flat = xi.reshape(-1)
        z = flat / scale(n)
        Dz = np.ones((flat.size, M), dtype=complex)
        Dz[:, a] = np.exp(1j * z)
        PD = P[None, :, :] * Dz[:, None, :]
        mats = np.linalg.matrix_power(PD, n - 1) if n > 1 else np.broadcast_to(np.eye(M), PD.shape)
        vec = np.einsum("kj,kji->ki", pi[None, :] * Dz, mats)
        with np.errstate(divide="ignore"):
            total = np.log(vec.sum(axis=1))
        return (total - 1j * z * n * pi[a]).reshape(xi.shape)

    @lru_cache(maxsize=8)
    def pmf(n):
        s = scale(n)
        return pmfs.markov_visit_pmf(P, a, n).affine(1 / s, -n * pi[a] / s)

    def sampler(n, rng, size):
        cum = np.cumsum(P, axis=1)
        state = np.searchsorted(np.cumsum(pi), rng.random(size), side="right")
        state = np.minimum(state, M - 1)
        visits = (state == a).astype(np.int64)
        for _ in range(1, n):
            u = rng.random(size)
            state = np.minimum((u[:, None] > cum[state]).sum(axis=1), M - 1)
            visits += state == a
        return (visits - n * pi[a]) / scale(n)

    model = ModPhiModel(
        name="markov", law=GAUSSIAN, t=t, log_charfn=log_charfn,
        charfn=lambda n, xi: np.exp(log_charfn(n, xi)), pmf=pmf, sampler=sampler,
        index_name="n", default_indices=(200, 1000, 5000), mod_phi_convergent=False,
        info={"pi": pi.tolist(), "theta_P": theta, "D": D, "A": 1.0, "state": a},
    )
    object.__setattr__(model, "variance", variance)
    return model


def markov_return_time_variance(P, a: int = 0) -> float:
    """Var(T_a) from the enumerated first-return law."""
    f = pmfs.return_time_distribution(P, a)
    k = np.arange(1, f.size + 1, dtype=float)
    mean = math.fsum(f * k)
    return math.fsum(f * (k - mean) ** 2)


# --- subgraph counts -----------------------------------------------------------------

def subgraph_count(p: float, A: float = 1.0) -> ModPhiModel:
    """Triangle counts in G(n, p), counted as injective embeddings ``I = 6 T``.

    ``E[I] = p^3 n(n-1)(n-2)``; the exact variance is used for ``t_n`` via
    the cumulant normalization with ``N_n = n(n-1)(n-2)`` and
    ``D_n = 6(n - 2)``.  The cumulant-bound constant ``A`` is a parameter.
    """
    if not 0 < p < 1:
        raise ValueError("edge probability must lie in (0, 1)")

    def falling(n):
        return n * (n - 1) * (n - 2)

    def triangle_variance(n):
        c3 = math.comb(n, 3)
        shared = n * (n - 1) * (n - 2) * (n - 3) / 2
        return c3 * (p**3 - p**6) + shared * (p**5 - p**6)

    def variance(n):
        return 36 * triangle_variance(n)

    def D(n):
        return 6 * (n - 2)

    def t(n):
        return cumulant_zone(variance(n), falling(n), D(n), A).t_n

    def scale(n):
        return falling(n) ** (1 / 3) * D(n) ** (2 / 3)

    def to_x(n, triangles):
        return (6 * np.asarray(triangles, dtype=float) - p**3 * falling(n)) / scale(n)

    @lru_cache(maxsize=8)
    def pmf(n):
        base = pmfs.triangle_count_pmf(n, p)
        s = scale(n)
        return base.affine(6 / s, -p**3 * falling(n) / s)

    def sampler(n, rng, size):
        return to_x(n, sample_triangles(n, p, rng, size))

    model = ModPhiModel(
        name="triangles", law=GAUSSIAN, t=t, pmf=pmf, sampler=sampler, index_name="n",
        default_indices=(5, 6, 7), mod_phi_convergent=False,
        info={"p": p, "A": A, "motif": "triangle"},
    )
    object.__setattr__(model, "variance", variance)
    object.__setattr__(model, "triangle_variance", triangle_variance)
    return model


def sample_triangles(n: int, p: float, rng, size: int) -> np.ndarray:
    """Triangle counts of ``size`` independent G(n, p) graphs."""
    out = np.empty(size, dtype=np.int64)
    if n <= 12:
        iu = np.triu_indices(n, 1)
        index = -np.ones((n, n), dtype=np.int64)
        index[iu] = np.arange(iu[0].size)
        tri = np.array([(index[i, j], index[i, k], index[j, k])
                        for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)])
        for s in range(0, size, 100_000):
            k = min(100_000, size - s)
            e = rng.random((k, iu[0].size)) < p
            out[s:s + k] = (e[:, tri[:, 0]] & e[:, tri[:, 1]] & e[:, tri[:, 2]]).sum(axis=1)
        return out
    for s in range(size):
        upper = np.triu(rng.random((n, n)) < p, 1).astype(float)
        adj = upper + upper.T
        out[s] = int(round(np.trace(adj @ adj @ adj) / 6))
    return out


# --- Gamma-product log-determinants -----------------------------------------------------

def _gamma_family(name, arguments, half, t_of, classical_center=None, default=(100, 10_000, 1_000_000)):
    """Log-characteristic functions ``sum_k w_k [log G(a_k + h i xi) - log G(a_k) - h i xi psi(a_k)]``.

    ``arguments(n)`` returns the Gamma arguments ``a_k`` with multiplicities
    ``w_k``; ``half`` is the coefficient ``h`` of ``i xi`` inside the Gamma
    functions.  Subtracting the digamma term centres the variable exactly at
    its mean.
    """

    def log_charfn(n, xi):
        ak, wk = arguments(n)
        psi = digamma(ak)
        lg0 = gammaln(ak)

        def block(x):
            z = 1j * half * x[:, None]
            terms = loggamma(ak[None, :] + z) - lg0[None, :] - z * psi[None, :]
            return terms @ wk
        return _chunked(block, xi, ak.size, budget=2**23)

    def mean_shift(n):
        # exact mean minus the unnormalized log-Mellin constant term
        ak, wk = arguments(n)
        return float(np.dot(wk, half * digamma(ak)))

    model = ModPhiModel(
        name=name, law=GAUSSIAN, t=t_of, log_charfn=log_charfn,
        charfn=lambda n, xi: np.exp(log_charfn(n, xi)), index_name="n",
        default_indices=default, mod_phi_convergent=True,
    )
    object.__setattr__(model, "mean_shift", mean_shift)
    return model


def gue_logdet() -> ModPhiModel:
    """``log|det W| - mean`` for an n x n GUE matrix, ``t_n = (1/2) log(n/2)``.

    From ``E|det W|^z = 2^(nz/2) prod_k G((z+1)/2 + floor(k/2)) / G(1/2 + floor(k/2))``.
    The exact mean is ``(n/2) log 2 + (1/2) sum_k psi(1/2 + floor(k/2))``;
    :func:`gue_classical_center` gives the classical centering for comparison.
    """
    def arguments(n):
        if n < 1:
            raise ValueError("n must be positive")
        j = np.arange(0, n // 2 + 1)
        w = (2 * j <= n).astype(float) + (2 * j + 1 <= n).astype(float)
        w[0] = 1.0                          # k = 1 is the only k with floor(k/2) = 0
        keep = w > 0
        return 0.5 + j[keep], w[keep]

    def t(n):
        if n < 3:
            raise ValueError("t_n = log(n/2)/2 is positive only for n >= 3")
        return 0.5 * math.log(n / 2)

    model = _gamma_family("gue", arguments, 0.5, t)
    object.__setattr__(model, "exact_mean",
                       lambda n: 0.5 * n * math.log(2) + model.mean_shift(n))
    return model


def gue_classical_center(n: int) -> float:
    return 0.5 * math.log(2 * math.pi) - n / 2 + (n / 2) * math.log(n)


def laguerre_logdet(beta: float = 2.0) -> ModPhiModel:
    """Centered log-determinant of the beta-Laguerre ensemble, ``t_n = (2/beta) log n``.

    ``E[e^{zX}] = e^{-z mu} 2^{nz} prod_k G(beta k/2 + z)/G(beta k/2)`` with the
    exact mean ``mu = n log 2 + sum_k psi(beta k/2)``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")

    def arguments(n):
        if n < 1:
            raise ValueError("n must be positive")
        k = np.arange(1, n + 1, dtype=float)
        return beta * k / 2, np.ones(n)

    def t(n):
        if n < 2:
            raise ValueError("t_n = (2/beta) log n is positive only for n >= 2")
        return 2 / beta * math.log(n)

    model = _gamma_family("laguerre", arguments, 1.0, t)
    object.__setattr__(model, "exact_mean", lambda n: n * math.log(2) + model.mean_shift(n))
    object.__setattr__(model, "beta", beta)
    return model


# --- Brownian winding --------------------------------------------------------------------

def winding_residue(t: float, xi, tol: float = 1e-17):
    r"""Residue of the winding angle at time ``t`` against the Cauchy law.

    With ``y = 1/(8t)`` and ``a = (|xi| + 1)/2``,

    .. math:: \theta_t(\xi) = \sqrt{\pi}\, e^{-2y} \sum_{k\ge0} \frac{y^{2k}}{k!}
              \Big[\frac{1}{\Gamma(k + a)} + \frac{y}{\Gamma(k + a + 1)}\Big],

    the Bessel series rewritten so that nothing underflows at large ``|xi|``.
    The series is summed until the ratio-test remainder falls below ``tol``.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    y = 1.0 / (8.0 * t)
    a = (xi + 1) / 2
    total = np.zeros(xi.shape)
    logy2 = 2 * math.log(y)
    for k in range(10_000):
        lead = math.exp(k * logy2 - gammaln(k + 1))
        term = lead * (rgamma(k + a) + y * rgamma(k + a + 1))
        total = total + term
        # the next ratio is below y^2/(k+1), the remainder geometric beyond it
        r = y * y / (k + 1)
        if r < 1 and np.all(term * r / (1 - r) <= tol * np.maximum(total, 1e-300)):
            break
    return math.sqrt(math.pi) * math.exp(-2 * y) * total


def winding_charfn_bessel(t: float, xi):
    """The transform in its Bessel form, via the series in :mod:`modlab.oracle.special`."""
    from .oracle.special import bessel_i

    xi = np.abs(np.asarray(xi, dtype=float))
    x = 1 / (4 * t)
    return math.sqrt(math.pi / (8 * t)) * math.exp(-x) * (
        bessel_i((xi - 1) / 2, x) + bessel_i((xi + 1) / 2, x))


def winding_limit(xi):
    return math.sqrt(math.pi) * rgamma((np.abs(np.asarray(xi, dtype=float)) + 1) / 2)


@lru_cache(maxsize=None)
def winding_limit_l1() -> float:
    from .oracle.quadrature import certified_quadrature

    res = certified_quadrature(winding_limit, 0.0, 80.0, tol=1e-14, rtol=1e-13, points=[4.0, 16.0])
    return 2 * float(res.value)


def winding_l1_bound(t: float) -> float:
    """The explicit bound on ``||theta_t - theta||_1`` obtained from the series."""
    y = 1 / (8 * t)
    e = math.exp(-1 / (4 * t))
    return winding_limit_l1() * ((1 - e) + e * (math.exp(y * y) - 1) + y * math.exp(-1 / (4 * t) + y * y))


def brownian_winding() -> ModPhiModel:
    """Winding angle of planar Brownian motion started at 1, indexed by time ``t``.

    ``E[e^{i xi phi_t}] = theta_t(xi) exp(-t_t |xi|)`` with ``t_t = log sqrt(8t)``;
    reference law Cauchy ``(1, 1, 0)``, so ``Y = phi_t / t_t``.
    """
    law = StableLaw.cauchy()

    def t_param(t):
        if not t > 0:
            raise ValueError("time must be positive")
        return 0.5 * math.log(8 * t)

    def log_charfn(t, xi):
        with np.errstate(divide="ignore"):
            return np.log(winding_residue(t, xi)) - t_param(t) * np.abs(np.asarray(xi, dtype=float))

    def charfn(t, xi):
        return winding_residue(t, xi) * np.exp(-t_param(t) * np.abs(np.asarray(xi, dtype=float)))

    def tail(t, Xi):
        # |theta_t| <= theta(u) e^{y^2}(1 + y) once (u + 1)/2 >= 1.4616, and
        # int_a^inf du / Gamma((u+1)/2) <= 2 / (Gamma(a0) psi(a0)) by log-convexity
        y = 1 / (8 * t)
        a0 = (Xi + 1) / 2
        limit_tail = 2 * math.sqrt(math.pi) * 2 * math.exp(-gammaln(a0)) / float(digamma(a0))
        return limit_tail * (1 + math.exp(y * y) * (1 + y))

    def y_tail(t, Xi):
        # |phi_Y(xi)| <= 2.01 e^{y^2}(1 + y) e^{-xi}: theta peaks just above 2
        y = 1 / (8 * t)
        return 2.01 * math.exp(y * y) * (1 + y) * math.exp(-Xi)

    return ModPhiModel(
        name="winding", law=law, t=t_param, charfn=charfn, log_charfn=log_charfn,
        index_name="t", default_indices=(1e3, 1e6, 1e9), continuous=True,
        mod_phi_convergent=True, l1_mod_phi=True, limiting_theta=winding_limit,
        l1_tail_bound=tail, y_charfn_tail=y_tail,
    )


# --- i.i.d. sums ------------------------------------------------------------------------

def pareto_stable_scale(alpha: float) -> float:
    """Scale ``c`` of the attractor of centred sums of Pareto(alpha) variables.

    For ``P[X > x] = x^(-alpha)`` on ``x >= 1`` and ``alpha`` in (0, 2),
    ``alpha != 1``, the sums normalized by ``n^(1/alpha)`` converge to the
    totally skewed stable law with ``c^alpha = Gamma(1 - alpha) cos(pi alpha / 2)``.
    """
    if not 0 < alpha < 2 or alpha == 1:
        raise ValueError("tail exponent must lie in (0, 2) minus {1}")
    return (math.gamma(1 - alpha) * math.cos(math.pi * alpha / 2)) ** (1 / alpha)


def calibrate_pareto_scale(alpha: float, rng, samples: int = 2_000_000,
                           xi=np.linspace(0.002, 0.03, 15)) -> float:
    """Least-squares fit of ``c`` from the empirical characteristic function.

    Fits ``Re log phi(xi) = -c^alpha xi^alpha + d xi^2`` at small ``xi``; the
    quadratic term absorbs the leading correction.
    """
    x = rng.random(samples) ** (-1 / alpha)
    phi = np.array([np.mean(np.exp(1j * s * x)) for s in xi])
    y = np.log(np.abs(phi))
    design = np.stack([-(xi**alpha), xi**2], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(max(coef[0], 0.0) ** (1 / alpha))


def iid_sum(increment: str = "exponential", alpha_tail: float = 1.5) -> ModPhiModel:
    """Sums of ``n`` i.i.d. increments: ``exponential``, ``uniform`` or ``pareto``.

    ``X_n = S_n - A_n`` with ``A_n = n m`` (or 0 for Pareto with
    ``alpha < 1``).  For the light-tailed increments the reference is the
    standard Gaussian and ``t_n = n sigma^2``; for Pareto it is the totally
    skewed law with the scale of :func:`pareto_stable_scale` and ``t_n = n``,
    so that ``Y_n = X_n / n^(1/alpha)``.
    """
    if increment == "exponential":
        mean, var = 1.0, 1.0
        law = GAUSSIAN

        def log_charfn(n, xi):
            xi = np.asarray(xi, dtype=float)
            return -n * np.log1p(-1j * xi) - 1j * n * xi

        def draw(rng, shape):
            return rng.exponential(1.0, shape)
    elif increment == "uniform":
        mean, var = 0.5, 1 / 12
        law = GAUSSIAN

        def log_charfn(n, xi):
            xi = np.asarray(xi, dtype=float)
            with np.errstate(divide="ignore"):
                return n * np.log(np.sinc(xi / (2 * np.pi)).astype(complex))

        def draw(rng, shape):
            return rng.random(shape)
    elif increment == "pareto":
        a = float(alpha_tail)
        law = StableLaw(pareto_stable_scale(a), a, 1.0)
        mean = a / (a - 1) if a > 1 else 0.0
        var = None
        log_charfn = None

        def draw(rng, shape):
            return rng.random(shape) ** (-1 / a)
    else:
        raise ValueError(f"unsupported increment {increment!r}")

    def t(n):
        return n * var if var is not None else float(n)

    def sampler(n, rng, size):
        out = np.empty(size)
        rows = max(1, 2_000_000 // n)
        for s in range(0, size, rows):
            k = min(rows, size - s)
            out[s:s + k] = draw(rng, (k, n)).sum(axis=1) - n * mean
        return out

    charfn = None if log_charfn is None else (lambda n, xi: np.exp(log_charfn(n, xi)))
    info = {"increment": increment, "mean": mean}
    if increment == "pareto":
        info.update(alpha=float(alpha_tail), A_n="n m", B_n="n^(1/alpha)", c=law.c)
    else:
        info.update(A_n="n m", B_n="sqrt(n var)", variance=var)
    return ModPhiModel(
        name="iid", law=law, t=t, charfn=charfn, log_charfn=log_charfn, sampler=sampler,
        index_name="n", default_indices=(10, 100, 1000), continuous=True,
        mod_phi_convergent=increment != "pareto", info=info,
    )


def _curie_weiss_factory(**kw):
    from .tilt import curie_weiss

    return curie_weiss(**kw)


MODEL_REGISTRY = {
    "partition": partition_size,
    "plane_partition": plane_partition_size,
    "gaf": gaf_zeros,
    "determinantal": determinantal_counts,
    "zeta2d": random_zeta,
    "markov": markov_visits,
    "triangles": subgraph_count,
    "gue": gue_logdet,
    "laguerre": laguerre_logdet,
    "winding": brownian_winding,
    "iid": iid_sum,
    "curie_weiss": _curie_weiss_factory,
}
