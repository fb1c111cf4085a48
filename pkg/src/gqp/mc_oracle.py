"""Feynman-Kac Monte Carlo for arithmetic Brownian motion.

Paths dX = mu dt + sigma dW are sampled exactly on a uniform grid.  Each
fixed-size chunk of paths draws from its own Philox stream keyed by
(seed, chunk index), and chunk statistics are merged in chunk order, so
results are bit-identical for any number of worker threads.

Set ``GQP_THREADS`` to cap the worker count (default: 1).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, VarianceBlowUp
from .group_core import ModelKind, ModelParams

__all__ = [
    "PathSpec",
    "McResult",
    "RunningMoments",
    "simulate_paths",
    "iter_chunks",
    "fk_price",
    "standard_error",
    "thread_count",
]

_SEED_MAX = 2**64


@dataclass(frozen=True)
class PathSpec:
    x0: float
    mu: float
    sigma: float
    horizon: float
    steps: int = 200
    n_paths: int = 100_000
    seed: int = 0
    antithetic: bool = True
    chunk_size: int = 8192

    def __post_init__(self):
        if self.steps < 16:
            raise DomainError("steps must be at least 16")
        if self.n_paths < 1000:
            raise DomainError("n_paths must be at least 1000")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < _SEED_MAX):
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.chunk_size < 2 or self.chunk_size % 2:
            raise DomainError("chunk_size must be an even integer >= 2")
        if self.antithetic and self.n_paths % 2:
            raise DomainError("antithetic sampling needs an even n_paths")


@dataclass(frozen=True)
class McResult:
    estimate: float
    std_error: float
    n_paths: int


class RunningMoments:
    """Count, mean and sum of squared deviations, mergeable in a fixed order."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, n=0, mean=0.0, m2=0.0):
        self.n, self.mean, self.m2 = n, mean, m2

    @classmethod
    def of(cls, samples) -> "RunningMoments":
        a = np.asarray(samples, dtype=float)
        if a.size == 0:
            return cls()
        mean = float(a.mean())
        return cls(a.size, mean, float(np.sum((a - mean) ** 2)))

    def push(self, value: float) -> None:
        self.n += 1
        d = value - self.mean
        self.mean += d / self.n
        self.m2 += d * (value - self.mean)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.n == 0:
            return self
        if self.n == 0:
            return RunningMoments(other.n, other.mean, other.m2)
        n = self.n + other.n
        d = other.mean - self.mean
        return RunningMoments(n, self.mean + d * other.n / n, self.m2 + other.m2 + d * d * self.n * other.n / n)

    @property
    def variance(self) -> float:
        if self.n < 2:
            raise DomainError("need at least two samples")
        return self.m2 / (self.n - 1)

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.n)


def standard_error(samples) -> float:
    """Sample standard deviation over sqrt(n), by one-pass accumulation."""
    acc = RunningMoments()
    for s in np.asarray(samples, dtype=float).ravel():
        acc.push(float(s))
    return acc.std_error


def thread_count() -> int:
    raw = os.environ.get("GQP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"GQP_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _chunk_sizes(spec: PathSpec):
    full, rest = divmod(spec.n_paths, spec.chunk_size)
    return [spec.chunk_size] * full + ([rest] if rest else [])


def _chunk_paths(spec: PathSpec, index: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(spec.seed), spawn_key=(index,))
    rng = np.random.Generator(np.random.Philox(ss))
    dt = spec.horizon / spec.steps
    if spec.antithetic:
        z = rng.standard_normal((size // 2, spec.steps))
        z = np.concatenate([z, -z])
    else:
        z = rng.standard_normal((size, spec.steps))
    inc = spec.mu * dt + spec.sigma * math.sqrt(dt) * z
    paths = np.empty((size, spec.steps + 1))
    paths[:, 0] = spec.x0
    np.cumsum(inc, axis=1, out=paths[:, 1:])
    paths[:, 1:] += spec.x0
    return paths


def iter_chunks(spec: PathSpec):
    """Yield (chunk index, paths) with paths of shape (size, steps + 1)."""
    for i, size in enumerate(_chunk_sizes(spec)):
        yield i, _chunk_paths(spec, i, size)


def simulate_paths(spec: PathSpec) -> np.ndarray:
    """Full path ensemble, shape (n_paths, steps + 1).  Rows of a chunk are
    ordered (originals, antithetic mirrors)."""
    return np.concatenate([p for _, p in iter_chunks(spec)])


def _trapezoid(vals: np.ndarray, dt: float) -> np.ndarray:
    return dt * (vals[:, 1:-1].sum(axis=1) + 0.5 * (vals[:, 0] + vals[:, -1]))


def _weights(model: ModelKind, paths, spec: PathSpec, params: ModelParams, stride: int = 1):
    sub = paths[:, ::stride]
    dt = spec.horizon / (sub.shape[1] - 1)
    if model is ModelKind.BlackScholes:
        return np.full(paths.shape[0], math.exp(-params.r * spec.horizon))
    if model is ModelKind.HoLee:
        return np.exp(params.beta * _trapezoid(sub, dt))
    g = 0.5 * params.omega**2 / params.sigma**2
    sgn = -1.0 if model is ModelKind.Harmonic else 1.0
    return np.exp(sgn * g * _trapezoid(sub * sub, dt))


def _chunk_samples(model, payoff, spec, params, index, size, stride):
    paths = _chunk_paths(spec, index, size)
    v = _weights(model, paths, spec, params, stride) * np.asarray(payoff(paths[:, -1]), float)
    if spec.antithetic:
        h = size // 2
        v = 0.5 * (v[:h] + v[h:])
    return RunningMoments.of(v)


def fk_price(model, payoff, spec: PathSpec, params: ModelParams, *,
             threads: int | None = None, stride: int = 1, check_variance: bool = True) -> McResult:
    """Feynman-Kac estimate of E[weight * payoff(X_T)].

    Weights: e^{-r T} (Black-Scholes), exp(beta int X ds) (Ho-Lee),
    exp(-+ omega^2 / (2 sigma^2) int X^2 ds) (harmonic / repulsive), with
    the integrals by the trapezoid rule.  ``stride`` evaluates the integral
    on every stride-th grid point of the same paths.  The standard error is
    computed over antithetic pair averages.

    Raises VarianceBlowUp when the standard error exceeds 10% of the
    estimate.
    """
    model = ModelKind.parse(model)
    if model is ModelKind.Repulsive and params.omega * spec.horizon > 1:
        raise DomainError("repulsive Monte Carlo is limited to omega * horizon <= 1")
    if model in (ModelKind.Harmonic, ModelKind.Repulsive):
        params.validate(model)
    if spec.steps % stride:
        raise DomainError("stride must divide steps")
    sizes = _chunk_sizes(spec)
    threads = thread_count() if threads is None else max(1, int(threads))
    job = lambda i: _chunk_samples(model, payoff, spec, params, i, sizes[i], stride)
    if threads == 1:
        parts = [job(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    acc = RunningMoments()
    for part in parts:
        acc = acc.merge(part)
    result = McResult(acc.mean, acc.std_error, spec.n_paths)
    if check_variance and not (result.std_error <= 0.1 * abs(result.estimate)):
        raise VarianceBlowUp(
            f"standard error {result.std_error:.3g} exceeds 10% of estimate {result.estimate:.3g}", result
        )
    return result
