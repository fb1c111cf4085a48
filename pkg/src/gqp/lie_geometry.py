"""Invariant vector fields, connection form, characteristic flows.

All vectors live on the (t, p, x, Xi) basis, where Xi is the fiber
generator acting on ln(zeta).  Numeric fields are obtained by pushing an
identity-tangent vector through left (or right) translation with central
differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .group_core import GroupElement, ModelKind, ModelParams, compose, energy

__all__ = [
    "INDICES",
    "TangentVector",
    "Covector",
    "FlowState",
    "livf_closed",
    "livf_numeric",
    "rivf_numeric",
    "rivf_closed_bs",
    "rivf_exact",
    "lie_bracket",
    "commutator_numeric",
    "connection_theta",
    "curvature",
    "characteristic_field",
    "characteristic_flow",
    "noether_charges",
    "lagrangian",
    "orthogonal_coords",
    "from_orthogonal",
    "diagonalizer",
]

INDICES = ("t", "p", "x", "zeta")


@dataclass(frozen=True)
class TangentVector:
    dt: float = 0.0
    dp: float = 0.0
    dx: float = 0.0
    dXi: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.dt, self.dp, self.dx, self.dXi])

    @classmethod
    def from_array(cls, v) -> "TangentVector":
        return cls(*(float(c) for c in v))

    def __add__(self, other):
        return TangentVector.from_array(self.as_array() + other.as_array())

    def __sub__(self, other):
        return TangentVector.from_array(self.as_array() - other.as_array())

    def __mul__(self, k: float):
        return TangentVector.from_array(k * self.as_array())

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


@dataclass(frozen=True)
class Covector:
    ct: float = 0.0
    cp: float = 0.0
    cx: float = 0.0
    cXi: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.ct, self.cp, self.cx, self.cXi])

    def __call__(self, v: TangentVector) -> float:
        return float(self.as_array() @ v.as_array())


@dataclass(frozen=True)
class FlowState:
    """A base point (t, p, x) with the Noether charges evaluated there."""

    t: float
    p: float
    x: float
    charges: tuple


def _point(point) -> GroupElement:
    if isinstance(point, GroupElement):
        return point
    vals = tuple(point)
    if len(vals) == 3:
        return GroupElement(*vals)
    return GroupElement(*vals[:3], vals[3])


def _index(index) -> int:
    try:
        return INDICES.index(index)
    except ValueError:
        raise DomainError(f"unknown index {index!r}; expected one of {INDICES}") from None


def livf_closed(model, index, point, params: ModelParams) -> TangentVector:
    """Closed-form left invariant field at ``point``.

    For Black-Scholes the rate enters through the shift X_t -> X_t - r Xi.
    """
    model = ModelKind.parse(model)
    params.validate(model)
    k = _index(index)
    g = _point(point)
    p, x = g.p, g.x
    if k == 3:
        return TangentVector(0, 0, 0, 1)
    if model in (ModelKind.BlackScholes, ModelKind.HoLee):
        if k == 0:
            xi = energy(p, params)
            xi += -params.r if model is ModelKind.BlackScholes else params.beta * x
            return TangentVector(1, 0, params.sigma**2 * p, xi)
        if k == 1:
            return TangentVector(0, 1, 0, x)
        return TangentVector(0, 0, 1, 0)
    lam2 = params.lam**2
    w = params.omega
    if k == 0:
        sgn = 1.0 if model is ModelKind.Harmonic else -1.0
        return TangentVector(1, sgn * w * lam2 * x, w * p / lam2, 0)
    if k == 1:
        return TangentVector(0, 1, 0, 0.5 * x)
    return TangentVector(0, 0, 1, -0.5 * p)


_H_MIN, _H_MAX = 1e-7, 1e-4


def _check_h(h):
    if not (_H_MIN <= h <= _H_MAX):
        raise DomainError(f"step {h} outside [{_H_MIN}, {_H_MAX}]")


def _delta(k: int, s: float) -> GroupElement:
    c = [0.0, 0.0, 0.0]
    if k == 3:
        return GroupElement(0.0, 0.0, 0.0, math.exp(s))
    c[k] = s
    return GroupElement(*c)


def _field_numeric(model, k, g, params, h, left: bool) -> np.ndarray:
    r_shift = model is ModelKind.BlackScholes and left and k == 0
    if k == 3:
        return np.array([0.0, 0.0, 0.0, 1.0])

    def f(s):
        d = _delta(k, s)
        out = compose(model, g, d, params) if left else compose(model, d, g, params)
        return out.log_coords()

    v = (f(h) - f(-h)) / (2 * h)
    if r_shift:
        v[3] -= params.r
    return v


def livf_numeric(model, index, point, params: ModelParams, h: float = 1e-5) -> TangentVector:
    """Left invariant field by differentiating compose(point, delta) at delta = e."""
    model = ModelKind.parse(model)
    params.validate(model)
    _check_h(h)
    return TangentVector.from_array(_field_numeric(model, _index(index), _point(point), params, h, True))


def rivf_numeric(model, index, point, params: ModelParams, h: float = 1e-5) -> TangentVector:
    """Right invariant field by differentiating compose(delta, point) at delta = e."""
    model = ModelKind.parse(model)
    params.validate(model)
    _check_h(h)
    return TangentVector.from_array(_field_numeric(model, _index(index), _point(point), params, h, False))


def rivf_closed_bs(index, point, params: ModelParams) -> TangentVector:
    """Closed-form Black-Scholes right invariant fields."""
    k = _index(index)
    g = _point(point)
    s2 = params.sigma**2
    if k == 0:
        return TangentVector(1, 0, 0, 0)
    if k == 1:
        return TangentVector(0, 1, s2 * g.t, (s2 * g.p + params.mu) * g.t)
    if k == 2:
        return TangentVector(0, 0, 1, g.p)
    return TangentVector(0, 0, 0, 1)


VectorField = Callable[[np.ndarray], np.ndarray]


def lie_bracket(X: VectorField, Y: VectorField, q, h: float = 1e-4) -> np.ndarray:
    """[X, Y] at base point q = (t, p, x) for fields returning 4-vectors.

    Coefficients do not depend on the fiber coordinate, so only three
    partial derivatives are needed.
    """
    q = np.asarray(q, dtype=float)
    JX = np.empty((4, 3))
    JY = np.empty((4, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        JX[:, j] = (X(q + e) - X(q - e)) / (2 * h)
        JY[:, j] = (Y(q + e) - Y(q - e)) / (2 * h)
    return JY @ X(q)[:3] - JX @ Y(q)[:3]


def _field(model, side, index, params, h):
    fn = livf_numeric if side == "L" else rivf_numeric

    def F(q):
        return fn(model, index, GroupElement(*q), params, h).as_array()

    return F


def commutator_numeric(
    model, i, j, point, params: ModelParams, side_i: str = "L", side_j: str = "L",
    h: float = 1e-4, h_inner: float = 1e-5,
) -> TangentVector:
    """Lie bracket of two numeric invariant fields (``side`` is 'L' or 'R')."""
    model = ModelKind.parse(model)
    g = _point(point)
    X = _field(model, side_i, i, params, h_inner)
    Y = _field(model, side_j, j, params, h_inner)
    return TangentVector.from_array(lie_bracket(X, Y, [g.t, g.p, g.x], h))


def connection_theta(model, point, params: ModelParams) -> Covector:
    """Vertical form Theta at ``point`` (rate-shifted for Black-Scholes)."""
    model = ModelKind.parse(model)
    params.validate(model)
    g = _point(point)
    p, x = g.p, g.x
    if model is ModelKind.BlackScholes:
        return Covector(-(energy(p, params) - params.r), -x, 0.0, 1.0)
    if model is ModelKind.HoLee:
        return Covector(-(energy(p, params) + params.beta * x), -x, 0.0, 1.0)
    lam2 = params.lam**2
    sgn = -1.0 if model is ModelKind.Harmonic else 1.0
    e = 0.5 * params.omega * (p * p / lam2 + sgn * lam2 * x * x)
    return Covector(-e, -0.5 * x, 0.5 * p, 1.0)


def curvature(model, point, params: ModelParams, h: float = 1e-5) -> np.ndarray:
    """Coefficients w_ij = d_i theta_j - d_j theta_i of dTheta on (t, p, x)."""
    g = _point(point)
    q = np.array([g.t, g.p, g.x])
    J = np.empty((3, 3))  # J[j, i] = d theta_j / d q_i
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        up = connection_theta(model, GroupElement(*(q + e)), params).as_array()[:3]
        dn = connection_theta(model, GroupElement(*(q - e)), params).as_array()[:3]
        J[:, i] = (up - dn) / (2 * h)
    return J.T - J


def characteristic_field(model, point, params: ModelParams) -> np.ndarray:
    """Base components (dt, dp, dx) of the characteristic field X_C."""
    model = ModelKind.parse(model)
    params.validate(model)
    g = _point(point)
    s2 = params.sigma**2
    if model is ModelKind.BlackScholes:
        return np.array([1.0, 0.0, s2 * g.p + params.mu])
    if model is ModelKind.HoLee:
        return np.array([1.0, -params.beta, s2 * g.p + params.mu])
    lam2 = params.lam**2
    sgn = 1.0 if model is ModelKind.Harmonic else -1.0
    return np.array([1.0, sgn * params.omega * lam2 * g.x, params.omega * g.p / lam2])


def rivf_exact(model, index, point, params: ModelParams) -> TangentVector:
    """Right invariant field without truncation error.

    The law is at most quadratic in the primed phase coordinates and
    linear in the primed time, so a unit-step central difference is exact.
    """
    model = ModelKind.parse(model)
    params.validate(model)
    return TangentVector.from_array(_field_numeric(model, _index(index), _point(point), params, 1.0, False))


def noether_charges(model, point, params: ModelParams) -> tuple:
    """Theta contracted with the right invariant fields (t, p, x).

    For Black-Scholes these are (-E0, -x0, p) with E0 = E(p) - r and
    x0 = x - (sigma^2 p + mu) t.
    """
    model = ModelKind.parse(model)
    g = _point(point)
    th = connection_theta(model, g, params)
    return tuple(th(rivf_exact(model, k, g, params)) for k in ("t", "p", "x"))


def characteristic_flow(
    model, initial, duration: float, params: ModelParams, steps: int = 1000, t0: float = 0.0,
) -> list[FlowState]:
    """RK4 trajectory of the characteristic field from (p, x) at time t0."""
    if steps < 10:
        raise DomainError("steps must be at least 10")
    model = ModelKind.parse(model)
    params.validate(model)
    p0, x0 = initial

    def f(y):
        return characteristic_field(model, GroupElement(*y), params)

    y = np.array([t0, p0, x0], dtype=float)
    ds = duration / steps
    out = [FlowState(*y, noether_charges(model, GroupElement(*y), params))]
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * ds * k1)
        k3 = f(y + 0.5 * ds * k2)
        k4 = f(y + ds * k3)
        y = y + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(FlowState(*y, noether_charges(model, GroupElement(*y), params)))
    return out


def lagrangian(model, x, xdot, params: ModelParams):
    model = ModelKind.parse(model)
    s2 = params.sigma**2
    if model is ModelKind.BlackScholes:
        return (xdot - params.mu) ** 2 / (2 * s2) - params.r
    if model is ModelKind.HoLee:
        raise DomainError("no Lagrangian is defined for the Ho-Lee model")
    params.validate(model)
    sgn = 1.0 if model is ModelKind.Harmonic else -1.0
    return (xdot**2 + sgn * 0.5 * params.omega**2 * x**2) / (2 * s2)


_SQRT_HALF = math.sqrt(0.5)


def orthogonal_coords(p, x, lam: float):
    """(A, B) = ((p/lam - lam x)/sqrt2, (p/lam + lam x)/sqrt2).

    In these coordinates the harmonic law decouples:
    A'' = A + A' e^{-omega t}, B'' = B + B' e^{omega t}.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return _SQRT_HALF * (p / lam - lam * x), _SQRT_HALF * (p / lam + lam * x)


def from_orthogonal(A, B, lam: float):
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return _SQRT_HALF * lam * (A + B), _SQRT_HALF * (B - A) / lam


def diagonalizer(lam: float) -> np.ndarray:
    """R = [[lam, -1/lam], [lam, 1/lam]] / sqrt2.

    With row-vector phase points, (A, B) = (p, x) R^{-1}, so
    R M_H(t) R^{-1} = diag(e^{-omega t}, e^{omega t}).
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return _SQRT_HALF * np.array([[lam, -1.0 / lam], [lam, 1.0 / lam]])
