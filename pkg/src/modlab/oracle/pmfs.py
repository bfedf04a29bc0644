"""Exact distributions for the model zoo.

Each routine returns an :class:`~modlab.pmf.ExactPmf` on the natural
integer lattice of the statistic (counts, sizes, magnetizations).  Models
rescale these with :meth:`ExactPmf.affine`.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from ..pmf import ExactPmf

TAIL_MASS = 1e-10


class TailMassError(ArithmeticError):
    """A truncated pmf misses more mass than allowed."""


class StateSpaceError(ValueError):
    """The requested dynamic program exceeds the supported size."""


def poisson_binomial(probs) -> ExactPmf:
    """Law of a sum of independent Bernoulli(p_j) variables.

    Direct O(m^2) convolution, one Bernoulli factor at a time.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise ValueError("Bernoulli parameters must lie in [0, 1]")
    dist = np.zeros(p.size + 1)
    dist[0] = 1.0
    for j, pj in enumerate(p):
        head = dist[: j + 2].copy()
        dist[1: j + 2] = head[1:] * (1 - pj) + head[:-1] * pj
        dist[0] = head[0] * (1 - pj)
    return ExactPmf(0.0, 1.0, dist / math.fsum(dist))


# --- integer partitions -----------------------------------------------------

_PARTITIONS = [1]


def partition_numbers(n_max: int) -> list[int]:
    """Exact partition numbers p(0..n_max) by Euler's pentagonal recurrence."""
    p = _PARTITIONS
    for m in range(len(p), n_max + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            g2 = g1 + k
            term = p[m - g1] + (p[m - g2] if g2 <= m else 0)
            total += term if k % 2 else -term
            k += 1
        p.append(total)
    return p[: n_max + 1]


def _log_euler_product(q: float, power: int = 0) -> float:
    """sum_n n^power log(1 - q^n), summed until the terms vanish."""
    total = 0.0
    n = 1
    while True:
        qn = q**n
        term = n**power * math.log1p(-qn)
        total += term
        if n**power * qn < 1e-18 * max(1.0, abs(total)) and n > 2:
            return total
        n += 1


def _partition_moments(q, weight):
    n = np.arange(1, 200_000)
    qn = q**n
    keep = n * weight(n) * qn > 0
    n, qn = n[keep], qn[keep]
    w = weight(n)
    mean = math.fsum(w * n * qn / (1 - qn))
    var = math.fsum(w * n**2 * qn / (1 - qn) ** 2)
    return mean, var


def _default_size(q, weight, N):
    if N is not None:
        return int(N)
    mean, var = _partition_moments(q, weight)
    return int(math.ceil(mean + 14 * math.sqrt(var) + 50))


def euler_partition_pmf(q: float, N: int | None = None) -> ExactPmf:
    """Size of a random partition under P[lambda] proportional to q^|lambda|.

    ``pmf(m) = p(m) q^m prod_n (1 - q^n)``.  The partition numbers are exact
    integers; the weights are assembled in log space, so nothing overflows
    and no cancellation occurs.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    N = _default_size(q, lambda n: np.ones_like(n, dtype=float), N)
    counts = partition_numbers(N)
    log_norm = _log_euler_product(q)
    logq = math.log(q)
    logw = np.array([math.log(c) for c in counts]) + logq * np.arange(N + 1) + log_norm
    w = np.exp(logw)
    missing = 1.0 - math.fsum(w)
    if missing > TAIL_MASS:
        raise TailMassError(f"size {N} leaves tail mass {missing:.2e}")
    return ExactPmf.from_weights(0.0, 1.0, w)


def partition_pmf_divisor(q: float, N: int) -> ExactPmf:
    """Same law via m r(m) = sum_k sigma(k) q^k r(m-k); all terms positive.

    An independent route used to cross-check :func:`euler_partition_pmf`.
    """
    return _divisor_recurrence(q, N, power=1)


def macmahon_pmf(q: float, N: int | None = None) -> ExactPmf:
    """Size of a random plane partition, weights from prod (1 - q^n)^(-n)."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    N = _default_size(q, lambda n: n.astype(float), N)
    pmf = _divisor_recurrence(q, N, power=2)
    return pmf


def _divisor_recurrence(q, N, power):
    # sigma_power(k) q^k, then m A(m) = sum_k s(k) A(m-k) for A(m) = a(m) q^m
    sig = np.zeros(N + 1)
    for d in range(1, N + 1):
        sig[d::d] += float(d) ** power
    k = np.arange(N + 1)
    with np.errstate(under="ignore"):
        s = sig * np.exp(k * math.log(q))
    A = np.zeros(N + 1)
    A[0] = 1.0
    log_scale = 0.0
    for m in range(1, N + 1):
        A[m] = np.dot(s[1: m + 1], A[m - 1:: -1][:m]) / m
        if A[m] > 1e250:
            A[: m + 1] *= 1e-250
            log_scale += 250 * math.log(10.0)
    weight_power = power - 1
    log_norm = math.fsum(
        n**weight_power * math.log1p(-q**n) for n in range(1, 100_000) if q**n > 1e-300
    )
    with np.errstate(divide="ignore"):
        logw = np.log(A) + log_scale + log_norm
    w = np.exp(logw)
    missing = 1.0 - math.fsum(w)
    if missing > TAIL_MASS:
        raise TailMassError(f"size {N} leaves tail mass {missing:.2e}")
    return ExactPmf.from_weights(0.0, 1.0, w)


@lru_cache(maxsize=None)
def plane_partition_numbers(n_max: int) -> tuple[int, ...]:
    """Exact plane partition counts via n a(n) = sum sigma_2(k) a(n-k)."""
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        for j in range(d, n_max + 1, d):
            sig[j] += d * d
    a = [1]
    for n in range(1, n_max + 1):
        a.append(sum(sig[k] * a[n - k] for k in range(1, n + 1)) // n)
    return tuple(a)


# --- Markov chains ----------------------------------------------------------

def stationary_distribution(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    M = P.shape[0]
    A = np.vstack([P.T - np.eye(M), np.ones(M)])
    rhs = np.zeros(M + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return pi


def markov_visit_pmf(P, a: int, n: int, max_steps: int = 10_000, max_states: int = 6) -> ExactPmf:
    """Number of visits to state ``a`` at times 1..n, stationary start.

    Dynamic program over (state, count); the count vector per state is
    shifted by one every time the chain sits in ``a``.
    """
    P = np.asarray(P, dtype=float)
    M = P.shape[0]
    if n > max_steps or M > max_states:
        raise StateSpaceError(f"DP capped at n <= {max_steps}, M <= {max_states}")
    pi = stationary_distribution(P)
    F = np.zeros((M, n + 1))
    F[:, 0] = pi
    F[a] = np.roll(F[a], 1)
    for step in range(1, n):
        G = P.T @ F
        G[a, 1: step + 2] = G[a, : step + 1].copy()
        G[a, 0] = 0.0
        F = G
    w = F.sum(axis=0)
    return ExactPmf.from_weights(0.0, 1.0, np.clip(w, 0.0, None))


def return_time_distribution(P, a: int, tol: float = 1e-16, max_len: int = 10**7) -> np.ndarray:
    """First return law to ``a``: entry ``k-1`` holds P_a[T_a = k].

    Enumerates first-passage probabilities through the taboo kernel on the
    other states until the remaining mass is below ``tol``.
    """
    P = np.asarray(P, dtype=float)
    others = [s for s in range(P.shape[0]) if s != a]
    Q = P[np.ix_(others, others)]
    out_row = P[a, others]
    into = P[others, a]
    f = [P[a, a]]
    v = out_row.copy()
    remaining = 1.0 - f[0]
    while remaining > tol and len(f) < max_len:
        fk = float(v @ into)
        f.append(fk)
        remaining -= fk
        v = v @ Q
        if not v.size:
            break
    return np.array(f)


# --- Curie-Weiss and graphs -------------------------------------------------

def curie_weiss_pmf(n: int) -> ExactPmf:
    """Magnetization M = sum of spins under exp(M^2 / 2n), lattice -n, -n+2, ..., n."""
    k = np.arange(n + 1)
    logw = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + (2 * k - n) ** 2 / (2.0 * n)
    return ExactPmf.from_log_weights(-float(n), 2.0, logw)


def triangle_count_pmf(n: int, p: float) -> ExactPmf:
    """Number of triangles in G(n, p), by enumeration of all graphs (n <= 7)."""
    if not 3 <= n <= 7:
        raise StateSpaceError("exhaustive enumeration supports 3 <= n <= 7")
    edges = list(itertools.combinations(range(n), 2))
    index = {e: j for j, e in enumerate(edges)}
    E = len(edges)
    graphs = np.arange(2**E, dtype=np.int64)
    bits = [((graphs >> j) & 1).astype(np.int8) for j in range(E)]
    tri = np.zeros(graphs.size, dtype=np.int64)
    for i, j, k in itertools.combinations(range(n), 3):
        tri += bits[index[i, j]] & bits[index[i, k]] & bits[index[j, k]]
    n_edges = np.sum(bits, axis=0, dtype=np.int64)
    weight = p**n_edges * (1 - p) ** (E - n_edges)
    w = np.bincount(tri, weights=weight)
    return ExactPmf.from_weights(0.0, 1.0, w)


def prime_sieve(N: int) -> np.ndarray:
    """Primes up to and including ``N``."""
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(N + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(N**0.5) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return np.flatnonzero(flags)
