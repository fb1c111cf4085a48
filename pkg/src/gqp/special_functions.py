"""Airy, Hermite and normal-distribution functions with range checks.

Airy functions and the normal CDF delegate to ``scipy.special``; this
module adds the supported-range contract.  Hermite functions use the
normalized three-term recurrence, which never forms 2^n n! and so cannot
overflow for the supported orders.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import DomainError

__all__ = [
    "AIRY_RANGE",
    "N_MAX",
    "SeriesControl",
    "airy_ai",
    "airy_bi",
    "airy_all",
    "hermite_h",
    "hermite_phi",
    "hermite_phi_all",
    "norm_cdf",
]

AIRY_RANGE = 15.0
N_MAX = 60


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for eigenfunction series."""

    max_terms: int = 40
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.max_terms < 16:
            raise DomainError("max_terms must be at least 16")
        if not (0 < self.abs_tol <= 1e-6):
            raise DomainError("abs_tol must lie in (0, 1e-6]")


def _airy_arg(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > AIRY_RANGE):
        raise DomainError(f"Airy argument outside |x| <= {AIRY_RANGE}")
    return x


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def airy_all(x):
    """(Ai, Ai', Bi, Bi') at x."""
    return tuple(_scalar(v) for v in sc.airy(_airy_arg(x)))


def airy_ai(x):
    return _scalar(sc.airy(_airy_arg(x))[0])


def airy_bi(x):
    return _scalar(sc.airy(_airy_arg(x))[2])


def _check_n(n):
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= N_MAX):
        raise DomainError(f"order must be an integer in [0, {N_MAX}], got {n!r}")


def hermite_h(n: int, x):
    """Physicists' Hermite polynomial by upward recurrence."""
    _check_n(n)
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return _scalar(h0)
    h1 = 2.0 * x
    for k in range(1, n):
        h0, h1 = h1, 2.0 * x * h1 - 2.0 * k * h0
    return _scalar(h1)


def hermite_phi_all(n_max: int, x) -> np.ndarray:
    """Rows phi_0 .. phi_{n_max} evaluated at x (shape (n_max+1,) + x.shape)."""
    _check_n(n_max)
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_phi(n: int, x):
    """Orthonormal Hermite function (2^n n! sqrt(pi))^{-1/2} H_n(x) e^{-x^2/2}."""
    return _scalar(hermite_phi_all(n, x)[n])


def norm_cdf(x):
    """Standard normal CDF, accurate in both tails."""
    return _scalar(sc.ndtr(np.asarray(x, dtype=float)))
