"""Closed-form pricing kernels K(x, x', tau) and their numerical checks.

Every kernel propagates a terminal payoff backward over the time to
maturity ``tau > 0``:

    V(tau, x) = integral of K(x, x', tau) V(0, x') dx'

and solves dK/dtau = L_x K with

    Black-Scholes   L = s^2/2 d_xx + mu d_x - r
    Ho-Lee          L = s^2/2 d_xx + mu d_x + beta x
    Mehler          L = s^2/2 d_xx - (omega^2 / (2 s^2)) x^2
    RepulsiveTrig   L = s^2/2 d_xx + (omega^2 / (2 s^2)) x^2
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .group_core import ModelParams
from .special_functions import N_MAX, hermite_phi_all
from .transforms import QuadratureSpec, integrate_window, weierstrass

__all__ = [
    "KernelKind",
    "KernelEval",
    "bs_kernel",
    "holee_kernel",
    "holee_omega",
    "holee_bch_apply",
    "mehler_kernel",
    "hermite_series_kernel",
    "repulsive_kernel",
    "kernel",
    "kernel_support",
    "generator_apply",
    "pde_residual",
    "semigroup_residual",
    "propagate",
    "momentum_kernel_bs",
]


class KernelKind(enum.Enum):
    BS = "bs"
    HoLee = "holee"
    Mehler = "mehler"
    RepulsiveTrig = "repulsive"

    @classmethod
    def parse(cls, value) -> "KernelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"blackscholes": cls.BS, "harmonic": cls.Mehler, "repulsivetrig": cls.RepulsiveTrig}
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        if key in aliases:
            return aliases[key]
        raise DomainError(f"unknown kernel {value!r}")


def _tau(tau):
    if not tau > 0:
        raise DomainError("tau must be positive (backward pricing direction only)")
    return float(tau)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def bs_kernel(x, xprime, tau, params: ModelParams):
    """e^{-r tau} (2 pi s^2 tau)^{-1/2} exp(-(x' - x - mu tau)^2 / (2 s^2 tau))."""
    tau = _tau(tau)
    v = params.sigma**2 * tau
    d = np.asarray(xprime, float) - np.asarray(x, float) - params.mu * tau
    return _out(math.exp(-params.r * tau) * np.exp(-d * d / (2 * v)) / math.sqrt(2 * math.pi * v))


def holee_omega(x, tau, params: ModelParams, beta: float | None = None):
    """Omega_beta(x, tau) = exp(beta x tau + beta^2 s^2 tau^3 / 6 + mu beta tau^2 / 2)."""
    b = params.beta if beta is None else beta
    s2 = params.sigma**2
    x = np.asarray(x, float)
    return _out(np.exp(b * x * tau + b * b * s2 * tau**3 / 6.0 + params.mu * b * tau**2 / 2.0))


def holee_kernel(x, xprime, tau, params: ModelParams):
    """Omega_beta(x, tau) K_BS(x + beta s^2 tau^2 / 2, x', tau) with r = 0."""
    tau = _tau(tau)
    shift = 0.5 * params.beta * params.sigma**2 * tau**2
    k = bs_kernel(np.asarray(x, float) + shift, xprime, tau, params.replace(r=0.0))
    return _out(holee_omega(x, tau, params) * k)


def holee_bch_apply(payoff, x, tau, params: ModelParams):
    """Ho-Lee propagator applied through its operator factorization.

    exp(tau H) = Omega_beta(x, tau) e^{beta s^2 tau^2 / 2 d} e^{s^2 tau / 2 d^2} e^{mu tau d},
    applied right to left: shift by mu tau, Weierstrass transform, shift,
    multiply.  Uses Gauss-Hermite quadrature and never forms the kernel.
    """
    tau = _tau(tau)
    s2 = params.sigma**2
    shifted = lambda y: payoff(y + params.mu * tau)
    x = np.asarray(x, float)
    w = weierstrass(shifted, 0.5 * s2 * tau, x + 0.5 * params.beta * s2 * tau**2)
    return _out(holee_omega(x, tau, params) * w)


def _osc(params: ModelParams, tau):
    tau = _tau(tau)
    if not params.omega > 0:
        raise DomainError("oscillator kernels require omega > 0")
    return tau, params.omega * tau, params.lam


def mehler_kernel(x, xprime, tau, params: ModelParams):
    """lam (2 pi sinh w)^{-1/2} exp(lam^2/2 (-coth w (x^2 + x'^2) + 2 csch w x x')), w = omega tau."""
    tau, w, lam = _osc(params, tau)
    x = np.asarray(x, float)
    xp = np.asarray(xprime, float)
    sh = math.sinh(w)
    q = -(x * x + xp * xp) * (math.cosh(w) / sh) + 2.0 * x * xp / sh
    return _out(lam / math.sqrt(2 * math.pi * sh) * np.exp(0.5 * lam * lam * q))


def repulsive_kernel(x, xprime, tau, params: ModelParams):
    """Trigonometric analogue of the Mehler kernel, valid for 0 < omega tau < pi."""
    tau, w, lam = _osc(params, tau)
    if not (0 < w < math.pi):
        raise DomainError(f"repulsive kernel needs 0 < omega tau < pi, got {w}")
    x = np.asarray(x, float)
    xp = np.asarray(xprime, float)
    sn = math.sin(w)
    q = -(x * x + xp * xp) * (math.cos(w) / sn) + 2.0 * x * xp / sn
    return _out(lam / math.sqrt(2 * math.pi * sn) * np.exp(0.5 * lam * lam * q))


def hermite_series_kernel(x, xprime, tau, params: ModelParams, n_max: int = 40):
    """Eigen-expansion lam * sum_n e^{-omega (n + 1/2) tau} phi_n(lam x) phi_n(lam x')."""
    tau, w, lam = _osc(params, tau)
    if w < 0.3:
        raise DomainError("series needs omega tau >= 0.3 to converge at the supported orders")
    if not (0 <= n_max <= N_MAX):
        raise DomainError(f"n_max must lie in [0, {N_MAX}]")
    x = np.asarray(x, float)
    xp = np.asarray(xprime, float)
    a = hermite_phi_all(n_max, lam * x)
    b = hermite_phi_all(n_max, lam * xp)
    decay = np.exp(-w * (np.arange(n_max + 1) + 0.5))
    return _out(lam * np.tensordot(decay, a * b, axes=1))


_KERNELS = {
    KernelKind.BS: bs_kernel,
    KernelKind.HoLee: holee_kernel,
    KernelKind.Mehler: mehler_kernel,
    KernelKind.RepulsiveTrig: repulsive_kernel,
}


def kernel(kind, x, xprime, tau, params: ModelParams):
    return _KERNELS[KernelKind.parse(kind)](x, xprime, tau, params)


@dataclass(frozen=True)
class KernelEval:
    """A kernel bound to its parameters; call as ``k(x, x', tau)``."""

    kind: KernelKind
    params: ModelParams

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind.parse(self.kind))
        if self.kind in (KernelKind.Mehler, KernelKind.RepulsiveTrig) and not self.params.omega > 0:
            raise DomainError("oscillator kernels require omega > 0")

    def __call__(self, x, xprime, tau):
        return kernel(self.kind, x, xprime, tau, self.params)


def kernel_support(kind, x: float, tau: float, params: ModelParams):
    """Center and standard deviation of x' -> K(x, x', tau)."""
    kind = KernelKind.parse(kind)
    tau = _tau(tau)
    s2 = params.sigma**2
    if kind is KernelKind.BS:
        return x + params.mu * tau, math.sqrt(s2 * tau)
    if kind is KernelKind.HoLee:
        return x + 0.5 * params.beta * s2 * tau**2 + params.mu * tau, math.sqrt(s2 * tau)
    _, w, lam = _osc(params, tau)
    if kind is KernelKind.Mehler:
        return x / math.cosh(w), math.sqrt(math.tanh(w)) / lam
    if not (0 < w < math.pi / 2):
        # the x'-Gaussian is only normalizable while cot(w) > 0
        raise DomainError("repulsive propagation needs 0 < omega tau < pi/2")
    return x / math.cos(w), math.sqrt(math.tan(w)) / lam


def generator_apply(kind, f, x, params: ModelParams, h: float = 1e-3):
    """L_x f at x with a 5-point second-derivative stencil."""
    kind = KernelKind.parse(kind)
    x = np.asarray(x, float)
    f0 = f(x)
    fp1, fm1, fp2, fm2 = f(x + h), f(x - h), f(x + 2 * h), f(x - 2 * h)
    fxx = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    fx = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    s2 = params.sigma**2
    out = 0.5 * s2 * fxx
    if kind is KernelKind.BS:
        return out + params.mu * fx - params.r * f0
    if kind is KernelKind.HoLee:
        return out + params.mu * fx + params.beta * x * f0
    pot = 0.5 * params.omega**2 / s2 * x * x
    return out - pot * f0 if kind is KernelKind.Mehler else out + pot * f0


def _check_steps(h_x, h_t):
    for name, h in (("h_x", h_x), ("h_t", h_t)):
        if not (1e-4 <= h <= 1e-2):
            raise DomainError(f"{name} = {h} outside [1e-4, 1e-2]")


def pde_residual(kind, x, xprime, tau, params: ModelParams, h_x: float = 1e-3, h_t: float = 1e-3):
    """|dK/dtau - L_x K| by central differences (3-point in tau, 5-point in x)."""
    kind = KernelKind.parse(kind)
    _check_steps(h_x, h_t)
    if not tau > 2 * h_t:
        raise DomainError("tau must exceed 2 h_t")
    k = lambda xx, tt: kernel(kind, xx, xprime, tt, params)
    kt = (k(x, tau + h_t) - k(x, tau - h_t)) / (2 * h_t)
    lk = generator_apply(kind, lambda xx: k(xx, tau), x, params, h_x)
    return _out(np.abs(kt - lk))


def semigroup_residual(kind, x, xprime, tau1, tau2, params: ModelParams,
                       q: QuadratureSpec | None = None):
    """|integral of K(x, y, tau1) K(y, x', tau2) dy - K(x, x', tau1 + tau2)|."""
    kind = KernelKind.parse(kind)
    c, sd = kernel_support(kind, x, tau1, params)
    hw = q.half_width if q is not None else 14.0 * sd
    nodes = q.nodes if q is not None else 2048
    k2 = kernel(kind, x, xprime, tau1 + tau2, params)
    g = lambda y: kernel(kind, x, y, tau1, params) * kernel(kind, y, xprime, tau2, params)
    val = integrate_window(g, c - hw, c + hw, nodes, on_edge="raise")
    return abs(val - k2)


def propagate(kind, payoff, tau, x_grid, params: ModelParams,
              q: QuadratureSpec | None = None, breaks=(), on_edge="warn"):
    """Price a terminal payoff on a grid by kernel quadrature.

    The window around each grid point is the kernel center +- 14 standard
    deviations (or ``q.half_width``).  Payoff kinks listed in ``breaks``
    become panel boundaries.  A TruncationWarning is issued when the
    integrand at a window edge exceeds 1e-12 of its peak.
    """
    kind = KernelKind.parse(kind)
    xs = np.atleast_1d(np.asarray(x_grid, float))
    nodes = q.nodes if q is not None else 1024
    breaks = tuple(breaks) + (tuple(q.breaks) if q is not None else ())
    out = np.empty(xs.shape)
    for i, x in enumerate(xs.flat):
        c, sd = kernel_support(kind, x, tau, params)
        hw = q.half_width if q is not None else 14.0 * sd
        g = lambda y: kernel(kind, x, y, tau, params) * payoff(y)
        out.flat[i] = integrate_window(g, c - hw, c + hw, nodes, breaks, on_edge=on_edge)
    return float(out[0]) if np.ndim(x_grid) == 0 else out.reshape(np.shape(x_grid))


def momentum_kernel_bs(p, t, params: ModelParams):
    """exp(-E_r(p) t) with E_r(p) = s^2 p^2 / 2 + mu p - r.

    Complex ``p`` is accepted so the kernel can be fed to Bromwich
    inversion; in x-space it reproduces bs_kernel(x, x', t) as a function
    of x - x' when inverted along a vertical line.
    """
    e = 0.5 * params.sigma**2 * p * p + params.mu * p - params.r
    return np.exp(-e * t)
