"""Finite lattice distributions.

An :class:`ExactPmf` is the common currency between the exact oracles and
the estimators: a probability vector sitting on the lattice
``offset + step * k`` for ``k = 0, ..., len(probs) - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ExactPmf:
    """Probability mass function on an arithmetic lattice.

    Parameters
    ----------
    offset : float
        Location of the first atom.
    step : float
        Lattice spacing, strictly positive.
    probs : ndarray
        Non-negative masses summing to one within ``1e-12``.
    """

    offset: float
    step: float
    probs: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-d array")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValueError("probs must be finite and non-negative")
        total = math_fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probs sum to {total!r}, not 1")
        if not self.step > 0:
            raise ValueError("step must be positive")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "step", float(self.step))

    @classmethod
    def from_weights(cls, offset, step, weights):
        """Normalize non-negative weights into a pmf."""
        w = np.asarray(weights, dtype=float)
        return cls(offset, step, w / math_fsum(w))

    @classmethod
    def from_log_weights(cls, offset, step, log_weights):
        lw = np.asarray(log_weights, dtype=float)
        w = np.exp(lw - lw.max())
        return cls.from_weights(offset, step, w)

    def __len__(self):
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return self.offset + self.step * np.arange(self.probs.size)

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def var(self) -> float:
        # centre on the lattice first to keep cancellation small
        k = np.arange(self.probs.size)
        mk = np.dot(k, self.probs)
        return float(self.step**2 * np.dot((k - mk) ** 2, self.probs))

    def mode(self) -> float:
        return float(self.offset + self.step * np.argmax(self.probs))

    def charfn(self, xi) -> np.ndarray:
        """E[exp(i xi X)] by direct summation over the atoms."""
        xi = np.asarray(xi, dtype=float)
        flat = xi.reshape(-1)
        k = np.arange(self.probs.size)
        out = np.empty(flat.shape, dtype=complex)
        # chunk to bound the size of the phase matrix
        chunk = max(1, 2**22 // self.probs.size)
        for s in range(0, flat.size, chunk):
            z = flat[s:s + chunk, None]
            out[s:s + chunk] = np.exp(1j * z * self.step * k) @ self.probs
        return (out * np.exp(1j * flat * self.offset)).reshape(xi.shape)

    def expect(self, f) -> float:
        return float(np.dot(f(self.support), self.probs))

    def affine(self, slope: float, shift: float) -> "ExactPmf":
        """Law of ``slope * X + shift``."""
        if slope > 0:
            return ExactPmf(slope * self.offset + shift, slope * self.step, self.probs)
        if slope < 0:
            last = self.offset + self.step * (self.probs.size - 1)
            return ExactPmf(slope * last + shift, -slope * self.step, self.probs[::-1])
        raise ValueError("slope must be non-zero")

    def cdf(self, x) -> np.ndarray:
        """P[X <= x]."""
        x = np.asarray(x, dtype=float)
        cum = np.cumsum(self.probs)
        idx = np.floor((x - self.offset) / self.step + 1e-9).astype(np.int64)
        inside = np.clip(idx, 0, self.probs.size - 1)
        out = np.where(idx < 0, 0.0, cum[inside])
        return np.where(idx >= self.probs.size, 1.0, out)

    def interval_mass(self, a: float, b: float) -> float:
        """P[a < X <= b]: atoms on ``a`` are excluded, atoms on ``b`` kept."""
        if b <= a:
            return 0.0
        vals = self.support
        mask = (vals > a) & (vals <= b)
        return math_fsum(self.probs[mask])


def math_fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).ravel())
