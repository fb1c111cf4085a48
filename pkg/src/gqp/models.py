"""Model-level prices and exact solutions.

Conventions: ``x`` is the log-price (Black-Scholes) or the short rate
(Ho-Lee); ``tau`` is the time to maturity.  The Ho-Lee equation is

    V_t + s^2/2 V_xx + mu V_x + beta x V = 0,

so a zero-coupon bond discounting at the short rate corresponds to
beta = -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, TruncationError
from .group_core import ModelParams
from .kernels import holee_omega, propagate
from .special_functions import AIRY_RANGE, N_MAX, airy_all, hermite_phi_all
from .transforms import QuadratureSpec, bromwich_invert

__all__ = [
    "CallSpec",
    "AiryMode",
    "HermiteSolution",
    "martingale_mu",
    "bs_call_closed",
    "bs_call_kernel",
    "bs_call_mellin",
    "saddle_abscissa",
    "call_mellin_transform",
    "holee_bond",
    "airy_variable",
    "airy_mode_eval",
    "hermite_solution_eval",
    "gauge_exponent",
    "numeraire_gauge",
    "holee_similarity_map",
]


@dataclass(frozen=True)
class CallSpec:
    spot: float
    strike: float
    tau: float
    sigma: float
    r: float = 0.0

    def __post_init__(self):
        for name in ("spot", "strike", "tau", "sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not math.isfinite(self.r):
            raise DomainError("r must be finite")

    @property
    def log_moneyness(self) -> float:
        return math.log(self.spot / self.strike)


@dataclass(frozen=True)
class AiryMode:
    lambda_i: float
    a_i: float = 1.0
    b_i: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.lambda_i, self.a_i, self.b_i)):
            raise DomainError("Airy mode entries must be finite")


@dataclass(frozen=True)
class HermiteSolution:
    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(a) for a in self.coefficients)
        if not (1 <= len(c) <= N_MAX + 1):
            raise DomainError(f"between 1 and {N_MAX + 1} coefficients are supported")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def mode(cls, n: int, alpha: float = 1.0) -> "HermiteSolution":
        return cls((0.0,) * n + (alpha,))


def martingale_mu(r: float, sigma: float) -> float:
    """Log-price drift that makes the discounted stock a martingale."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return r - 0.5 * sigma**2


def bs_call_closed(spec: CallSpec) -> float:
    from scipy.special import ndtr

    s, k, t, v = spec.spot, spec.strike, spec.tau, spec.sigma
    sd = v * math.sqrt(t)
    d1 = (math.log(s / k) + (spec.r + 0.5 * v * v) * t) / sd
    return float(s * ndtr(d1) - k * math.exp(-spec.r * t) * ndtr(d1 - sd))


def bs_call_kernel(spec: CallSpec, q: QuadratureSpec | None = None) -> float:
    """Call price by quadrature of the payoff against the log-price kernel."""
    params = ModelParams(spec.sigma, r=spec.r, mu=martingale_mu(spec.r, spec.sigma))
    k = spec.strike
    payoff = lambda y: np.maximum(np.exp(y) - k, 0.0)
    return propagate("bs", payoff, spec.tau, math.log(spec.spot), params, q=q, breaks=(math.log(k),))


def call_mellin_transform(z, strike: float):
    """Mellin transform of (y - K)^+ : K^{1-z} / (z (z - 1)), Re z > 1."""
    return strike ** (1 - z) / (z * (z - 1))


def saddle_abscissa(spec: CallSpec, mu: float | None = None) -> float:
    """Real saddle of the Mellin integrand, clipped into the strip c > 1."""
    mu = martingale_mu(spec.r, spec.sigma) if mu is None else mu
    c = (math.log(spec.strike / spec.spot) - mu * spec.tau) / (spec.sigma**2 * spec.tau)
    return max(c, 1.5)


def bs_call_mellin(spec: CallSpec, c: float | str = 2.0, q: QuadratureSpec | None = None,
                   mu: float | None = None, tol: float = 1e-12) -> float:
    """Call price by inverting its Mellin representation along Re p = c.

    V = e^{-r tau} (1 / 2 pi i) integral of K^{1-p} / (p (p - 1))
        exp((s^2 p^2 / 2 + mu p) tau) S^p dp,   1 < c.

    ``c='saddle'`` moves the contour through the integrand's real saddle,
    which keeps deep out-of-the-money prices from cancelling to noise.
    ``mu`` defaults to the martingale drift r - s^2/2.  Without ``q`` the
    contour half-width is chosen from the Gaussian decay
    exp(-s^2 tau v^2 / 2) so the truncated tail is below ``tol``.
    """
    mu = martingale_mu(spec.r, spec.sigma) if mu is None else mu
    if c == "saddle":
        c = saddle_abscissa(spec, mu)
    if not c > 1:
        raise DomainError("the call's Mellin strip requires c > 1")
    v2 = spec.sigma**2 * spec.tau
    if q is None:
        H = math.sqrt(2.0 * (math.log(1.0 / tol) + 2 * math.log(max(c, 1.0) + 1)) / v2) + 2.0
        q = QuadratureSpec("mellin_line", c=c, half_width=H, nodes=max(4096, int(64 * H * math.sqrt(v2)) | 1))
    else:
        q = q.with_(c=c)
    lk, ls = math.log(spec.strike), math.log(spec.spot)

    def log_g(p):
        return (1 - p) * lk + p * ls + (0.5 * spec.sigma**2 * p * p + mu * p) * spec.tau

    # the integrand is evaluated in log form, scaled by its size at p = c
    scale = log_g(c)

    def F(p):
        return np.exp(log_g(p) - scale) / (p * (p - 1))

    return math.exp(scale - spec.r * spec.tau) * bromwich_invert(F, q, 0.0, tail_tol=tol)


def holee_bond(x, tau, params: ModelParams):
    """Zero-coupon bond E[exp(-integral of X ds)] for dX = mu dt + s dW.

    Equals Omega_{-1}(x, tau) = exp(-x tau - mu tau^2 / 2 + s^2 tau^3 / 6).
    """
    if not np.all(np.asarray(tau) >= 0):
        raise DomainError("tau must be non-negative")
    return holee_omega(x, tau, params, beta=-1.0)


def airy_variable(x, lambda_i: float, params: ModelParams):
    """y = (2 / (s^2 beta^2))^{1/3} (mu^2 / (2 s^2) - lambda_i - beta x)."""
    b = params.beta
    if b == 0:
        raise DomainError("Airy modes need beta != 0")
    s2 = params.sigma**2
    scale = np.cbrt(2.0 / (s2 * b * b))
    return scale * (params.mu**2 / (2 * s2) - lambda_i - b * np.asarray(x, float))


def airy_mode_eval(mode, x, t, params: ModelParams):
    """V = e^{-mu x / s^2} e^{lambda t} (a Ai(y) + b Bi(y)), summed over modes.

    Solves V_t + s^2/2 V_xx + mu V_x + beta x V = 0.  ``mode`` may be a
    single AiryMode or a sequence of them.
    """
    modes = (mode,) if isinstance(mode, AiryMode) else tuple(mode)
    x = np.asarray(x, float)
    total = np.zeros(np.broadcast(x, np.asarray(t, float)).shape)
    for m in modes:
        if m.a_i == 0 and m.b_i == 0:
            continue
        y = airy_variable(x, m.lambda_i, params)
        if np.any(np.abs(y) > AIRY_RANGE):
            raise DomainError("Airy argument outside the supported range")
        ai, _, bi, _ = airy_all(y)
        total = total + np.exp(m.lambda_i * np.asarray(t, float)) * (m.a_i * ai + m.b_i * bi)
    out = np.exp(-params.mu * x / params.sigma**2) * total
    return float(out) if out.ndim == 0 else out


def hermite_solution_eval(sol: HermiteSolution, x, tau, params: ModelParams):
    """psi(tau, x) = sum_n e^{-omega (n + 1/2) tau} alpha_n phi_n(lam x)."""
    lam = params.lam
    a = np.asarray(sol.coefficients)
    n = np.arange(a.size)
    phi = hermite_phi_all(a.size - 1, lam * np.asarray(x, float))
    w = a * np.exp(-params.omega * (n + 0.5) * tau)
    out = np.tensordot(w, phi, axes=1)
    return float(out) if np.ndim(out) == 0 else out


def gauge_exponent(x, t, vprime: float, params: ModelParams):
    """eps = (v' / s^2)(v' t / 2 - (x - mu t))."""
    return vprime / params.sigma**2 * (0.5 * vprime * t - (np.asarray(x, float) - params.mu * t))


def numeraire_gauge(values, x, t, vprime: float, params: ModelParams):
    """Map a solution of the boosted equation back to the original one.

    ``values`` solve V_t + s^2/2 V_xx + (mu + v') V_x - r V = 0 on the
    points ``x`` at time ``t``; the result e^{-eps} V solves the equation
    with drift ``mu``.  Multiplying by e^{+eps} goes the other way.
    """
    values = np.asarray(values, float)
    x = np.asarray(x, float)
    try:
        shape = np.broadcast(x, values).shape
    except ValueError:
        shape = None
    if values.shape != shape:
        raise DomainError("values and grid shapes differ")
    return values * np.exp(-gauge_exponent(x, t, vprime, params))


def holee_similarity_map(v_bs, x_grid, tau, params: ModelParams, x_out=None):
    """V(x, tau) = Omega_beta(x, tau) V_BS(x + beta s^2 tau^2 / 2, tau).

    ``v_bs`` is a zero-rate Black-Scholes solution sampled on ``x_grid`` at
    time to maturity ``tau``; it is interpolated with a cubic spline at the
    shifted points.  ``x_out`` defaults to the grid points whose shift
    stays inside the grid.
    """
    x_grid = np.asarray(x_grid, float)
    v_bs = np.asarray(v_bs, float)
    shift = 0.5 * params.beta * params.sigma**2 * tau**2
    if params.beta == 0:
        xo = x_grid if x_out is None else np.asarray(x_out, float)
        return (v_bs if x_out is None else CubicSpline(x_grid, v_bs)(xo))
    if x_out is None:
        xo = x_grid[(x_grid + shift >= x_grid[0]) & (x_grid + shift <= x_grid[-1])]
        if xo.size == 0:
            raise TruncationError("shift exceeds the grid")
    else:
        xo = np.asarray(x_out, float)
    xs = xo + shift
    if np.any(xs < x_grid[0]) or np.any(xs > x_grid[-1]):
        raise TruncationError("shifted points fall outside the sampled grid")
    return holee_omega(xo, tau, params) * CubicSpline(x_grid, v_bs)(xs)
