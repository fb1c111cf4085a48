"""Linear canonical, Bromwich, Mellin and Weierstrass transforms.

Real-line integrals use composite Gauss-Legendre panels on a truncated
window, optionally split at caller-supplied ``breaks`` (payoff kinks).
Contour integrals use the uniform trapezoid rule on ``c + i[-H, H]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError, TruncationError, TruncationWarning
from .group_core import SL2Matrix

__all__ = [
    "QuadratureSpec",
    "FOURIER",
    "gl_nodes",
    "integrate_window",
    "lct_kernel",
    "lct_apply",
    "bromwich_invert",
    "mellin_forward",
    "mellin_invert",
    "weierstrass",
]

KINDS = ("real_line", "bromwich", "mellin_line")

# Fourier transform matrix, kept for reference; complex-b kernels are not applied.
FOURIER = SL2Matrix(0.0, 1.0, -1.0, 0.0)

_PANEL_ORDER = 16


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid or contour description.

    Parameters
    ----------
    kind : {'real_line', 'bromwich', 'mellin_line'}
    c : float
        Contour abscissa (contour kinds) or window center (real line).
    half_width : float
        Imaginary extent H of the contour, or half-length of the real window.
    nodes : int
        Node count: trapezoid points on a contour, total Gauss-Legendre
        points on a window.
    breaks : tuple of float
        Extra panel boundaries on a real window.
    """

    kind: str = "bromwich"
    c: float = 0.0
    half_width: float = 40.0
    nodes: int = 4096
    breaks: tuple = field(default_factory=tuple)
    mesh: str = "uniform"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        if self.nodes < 64:
            raise DomainError("nodes must be at least 64")
        if not self.half_width > 0:
            raise DomainError("half_width must be positive")
        if self.mesh != "uniform":
            raise DomainError("only the uniform mesh is supported")

    def with_(self, **changes) -> "QuadratureSpec":
        from dataclasses import replace

        return replace(self, **changes)


@lru_cache(maxsize=8)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gl_nodes(lo: float, hi: float, nodes: int = 4096, breaks=()):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    n_panels = max(1, nodes // _PANEL_ORDER)
    edges = np.linspace(lo, hi, n_panels + 1)
    if len(breaks):
        inner = [b for b in breaks if lo < b < hi]
        edges = np.unique(np.concatenate([edges, inner]))
    xg, wg = _leggauss(_PANEL_ORDER)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def integrate_window(g, lo, hi, nodes=4096, breaks=(), edge_tol=1e-12, on_edge="warn"):
    """Integrate g over [lo, hi] and check the edge magnitude.

    ``on_edge`` is 'warn', 'raise' or 'ignore'.  The edge check compares
    |g| at both ends against ``edge_tol`` times the peak magnitude.
    """
    x, w = gl_nodes(lo, hi, nodes, breaks)
    vals = g(x)
    if on_edge != "ignore":
        ends = np.abs(g(np.array([lo, hi])))
        peak = max(float(np.max(np.abs(vals))), 1e-300)
        if np.any(ends > edge_tol * peak):
            msg = f"integrand at window edge is {float(ends.max() / peak):.3g} of its peak"
            if on_edge == "raise":
                raise TruncationError(msg)
            warnings.warn(msg, TruncationWarning, stacklevel=3)
    return np.sum(w * vals)


def _as_matrix(M) -> SL2Matrix:
    return M if isinstance(M, SL2Matrix) else SL2Matrix.from_array(M)


def lct_kernel(M, x, xprime):
    """Real Gaussian LCT kernel (2 pi b)^{-1/2} exp(-(a x'^2 - 2 x x' + d x^2) / (2b))."""
    M = _as_matrix(M)
    if not M.b > 0:
        raise DomainError(f"real LCT kernel requires b > 0, got b = {M.b}")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xprime, dtype=float)
    q = M.a * xp * xp - 2.0 * x * xp + M.d * x * x
    out = np.exp(-q / (2.0 * M.b)) / math.sqrt(2.0 * math.pi * M.b)
    return float(out) if out.ndim == 0 else out


def lct_apply(M, f, x, q: QuadratureSpec | None = None, on_edge="warn"):
    """Quadrature of the integral of W(M, x, x') f(x') over x'.

    The window is centered on the kernel peak x/a.  Without ``q`` its
    half-width is 16 kernel standard deviations sqrt(b/a).
    """
    M = _as_matrix(M)
    if not M.b > 0:
        raise DomainError(f"real LCT kernel requires b > 0, got b = {M.b}")
    if not M.a > 0:
        raise DomainError("applying the kernel requires a > 0 (Gaussian decay in x')")
    sd = math.sqrt(M.b / M.a)
    hw = q.half_width if q is not None else 16.0 * sd
    nodes = q.nodes if q is not None else 1024
    breaks = q.breaks if q is not None else ()
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape)
    for i, xi in enumerate(xs.flat):
        center = xi / M.a
        out.flat[i] = integrate_window(
            lambda y: lct_kernel(M, xi, y) * f(y), center - hw, center + hw, nodes, breaks,
            on_edge=on_edge,
        )
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


@dataclass(frozen=True)
class BromwichResult:
    value: float
    imag_residue: float


def _bromwich_trapezoid(F, q: QuadratureSpec, x, tail_tol):
    v = np.linspace(-q.half_width, q.half_width, q.nodes)
    p = q.c + 1j * v
    vals = np.exp(x * p) * F(p)
    mag = np.abs(vals)
    peak = max(float(mag.max()), 1e-300)
    tail = max(mag[0], mag[-1]) / peak
    if not np.isfinite(tail) or tail > tail_tol:
        raise TruncationError(
            f"contour integrand has not decayed at |Im p| = {q.half_width} "
            f"(tail/peak = {tail:.3g}); widen half_width or use method='fourier'"
        )
    dv = v[1] - v[0]
    s = dv * (np.sum(vals) - 0.5 * (vals[0] + vals[-1])) / (2.0 * math.pi)
    return complex(s)


def _bromwich_fourier(F, c, x, limit):
    # conjugate symmetry F(conj p) = conj F(p): the integral over v in R
    # folds onto [0, inf) with cos/sin weights (QUADPACK QAWF)
    if x == 0:
        raise DomainError("the Fourier-weighted method needs x != 0")
    w = abs(x)
    sgn = 1.0 if x > 0 else -1.0
    re = integrate.quad(lambda v: F(c + 1j * v).real, 0, np.inf, weight="cos", wvar=w, limlst=limit)[0]
    im = integrate.quad(lambda v: F(c + 1j * v).imag, 0, np.inf, weight="sin", wvar=w, limlst=limit)[0]
    return complex(math.exp(c * x) * (re - sgn * im) / math.pi)


def bromwich_invert(F, q: QuadratureSpec | None = None, x: float = 0.0, *,
                    method: str = "trapezoid", tail_tol: float = 1e-12,
                    full_output: bool = False):
    """Invert a bilateral Laplace transform along Re p = c.

    Computes (1 / 2 pi i) times the integral of e^{x p} F(p) dp over the
    vertical line, with ``F`` vectorized over complex arrays.

    Parameters
    ----------
    F : callable
        Transform, analytic to the right of ``q.c``.
    q : QuadratureSpec
        Contour description (``kind='bromwich'``); defaults to c = 0,
        H = 40, 4096 nodes.
    x : float
        Evaluation point.
    method : {'trapezoid', 'fourier'}
        'trapezoid' truncates at |Im p| = H and raises TruncationError if
        the integrand has not decayed there.  'fourier' handles slowly
        decaying transforms of real functions with QUADPACK's Fourier
        integral routine and ignores ``half_width``/``nodes``.
    full_output : bool
        Also return the imaginary residue as a diagnostic.
    """
    q = q if q is not None else QuadratureSpec("bromwich")
    if method == "trapezoid":
        z = _bromwich_trapezoid(F, q, x, tail_tol)
    elif method == "fourier":
        z = _bromwich_fourier(F, q.c, x, 200)
    else:
        raise DomainError(f"unknown method {method!r}")
    if full_output:
        return BromwichResult(z.real, abs(z.imag))
    return z.real


def mellin_forward(f, z, q: QuadratureSpec | None = None, div_tol: float = 1e-8):
    """Mellin transform, the integral of y^{-z-1} f(y) dy over (0, inf).

    Evaluated in u = ln y on the window ``q.c +- q.half_width`` (default
    [-40, 40]) with panel breaks ``q.breaks`` given in ln y.  Raises
    DivergenceError when the integrand has not decayed at either end.
    """
    q = q if q is not None else QuadratureSpec("real_line", c=0.0, half_width=40.0)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    lo, hi = q.c - q.half_width, q.c + q.half_width
    u, w = gl_nodes(lo, hi, q.nodes, q.breaks)
    fu = np.asarray(f(np.exp(u)), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.exp(-np.outer(zs, u)) * fu[None, :]
        ends = np.abs(np.exp(-np.outer(zs, [lo, hi])) * np.asarray(f(np.exp([lo, hi])), float)[None, :])
    peak = np.max(np.abs(vals), axis=1)
    bad = ~np.isfinite(peak) | np.any(~np.isfinite(ends) | (ends > div_tol * peak[:, None]), axis=1)
    if np.any(bad):
        raise DivergenceError(
            f"Mellin integral diverges or is truncated at z = {zs[bad][0]}; z is outside the convergence strip"
        )
    out = vals @ w
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def mellin_invert(F, c: float, y: float, q: QuadratureSpec | None = None, **kw):
    """Inverse Mellin transform: Bromwich inversion in the variable ln y."""
    if not y > 0:
        raise DomainError("y must be positive")
    q = (q if q is not None else QuadratureSpec("mellin_line")).with_(c=c)
    return bromwich_invert(F, q, math.log(y), **kw)


def weierstrass(f, t: float, x, q: QuadratureSpec | None = None):
    """Heat semigroup e^{t d^2/dx^2} f at x.

    The kernel is (4 pi t)^{-1/2} exp(-y^2 / (4t)).  Without ``q`` the
    integral is evaluated by 128-point Gauss-Hermite quadrature (exact for
    smooth f of moderate growth); with a real-line spec it falls back to
    composite Gauss-Legendre around x.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    xs = np.asarray(x, dtype=float)
    if q is None:
        s, ws = np.polynomial.hermite.hermgauss(128)
        y = xs[..., None] - 2.0 * math.sqrt(t) * s
        out = np.asarray(f(y)) @ ws / math.sqrt(math.pi)
    else:
        return lct_apply(SL2Matrix(1.0, 2.0 * t, 0.0, 1.0), f, x, q)
    return float(out) if out.ndim == 0 else out
