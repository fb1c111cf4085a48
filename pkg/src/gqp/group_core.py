"""Quantization groups: elements, composition laws, cocycles and inverses.

Each model is a central extension of a semidirect product of time
translations with a two-dimensional phase space ``u = (p, x)`` by the
multiplicative fiber ``zeta > 0``.  Writing ``g' = g2`` for the left
(primed) factor and ``g = g1`` for the right one, every law has the form

    t'' = t' + t
    u'' = u' M(t) + u            (u is a row vector)
    zeta'' = zeta' zeta exp(eps(g', g))

where ``M(t)`` is the model's SL(2, R) generator.  ``compose(m, g2, g1)``
always returns ``g2 * g1`` in this sense.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelKind",
    "ModelParams",
    "GroupElement",
    "SL2Matrix",
    "HWParams",
    "IDENTITY",
    "sl2_generator",
    "compose",
    "inverse",
    "cocycle",
    "cocycle_identity_residual",
    "symplectic_residual",
    "hw_compose",
    "energy",
]


class ModelKind(enum.Enum):
    BlackScholes = "bs"
    HoLee = "holee"
    Harmonic = "harmonic"
    Repulsive = "repulsive"

    @classmethod
    def parse(cls, value) -> "ModelKind":
        """Accept a ModelKind, its value or its name (case-insensitive)."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise DomainError(f"unknown model {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Model constants.

    Parameters
    ----------
    sigma : float
        Volatility, per square-root time.  Must be positive.
    r : float
        Short rate.
    mu : float
        Numeraire drift.
    beta : float
        Linear-potential strength (Ho-Lee).
    omega : float
        Oscillator frequency.
    """

    sigma: float
    r: float = 0.0
    mu: float = 0.0
    beta: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        for name in ("sigma", "r", "mu", "beta", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def lam(self) -> float:
        """Oscillator scale lambda = sqrt(omega) / sigma."""
        if self.omega <= 0:
            raise DomainError("lambda requires omega > 0")
        return math.sqrt(self.omega) / self.sigma

    def validate(self, model: ModelKind) -> "ModelParams":
        if model in (ModelKind.Harmonic, ModelKind.Repulsive) and not self.omega > 0:
            raise DomainError(f"{model.name} requires omega > 0, got {self.omega}")
        return self

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class GroupElement:
    t: float = 0.0
    p: float = 0.0
    x: float = 0.0
    zeta: float = 1.0

    def __post_init__(self):
        if not self.zeta > 0:
            raise DomainError(f"fiber coordinate must be positive, got {self.zeta}")

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls()

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.p, self.x, self.zeta])

    def log_coords(self) -> np.ndarray:
        """Coordinates with the fiber linearized: (t, p, x, ln zeta)."""
        return np.array([self.t, self.p, self.x, math.log(self.zeta)])


IDENTITY = GroupElement()


# Scaled determinant tolerance: for large |omega t| the entries grow like
# e^{|omega t|} and cosh^2 - sinh^2 loses absolute precision.
_DET_TOL = 1e-12


@dataclass(frozen=True)
class SL2Matrix:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        scale = max(1.0, abs(self.a * self.d) + abs(self.b * self.c))
        if abs(self.det() - 1.0) > _DET_TOL * scale:
            raise DomainError(f"determinant {self.det()!r} is not 1")

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "SL2Matrix") -> "SL2Matrix":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return SL2Matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    @classmethod
    def from_array(cls, m) -> "SL2Matrix":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


@dataclass(frozen=True)
class HWParams:
    gamma: float = 1.0


def sl2_generator(model: ModelKind, t: float, params: ModelParams) -> SL2Matrix:
    """One-parameter subgroup M(t) generating the model's dynamics."""
    model = ModelKind.parse(model)
    params.validate(model)
    if model in (ModelKind.BlackScholes, ModelKind.HoLee):
        return SL2Matrix(1.0, params.sigma**2 * t, 0.0, 1.0)
    w = params.omega * t
    lam2 = params.lam**2
    if model is ModelKind.Harmonic:
        ch, sh = math.cosh(w), math.sinh(w)
        return SL2Matrix(ch, sh / lam2, lam2 * sh, ch)
    co, si = math.cos(w), math.sin(w)
    return SL2Matrix(co, si / lam2, -lam2 * si, co)


def energy(p, params: ModelParams):
    """Black-Scholes energy E(p) = sigma^2 p^2 / 2 + mu p."""
    return 0.5 * params.sigma**2 * p * p + params.mu * p


def _cocycle(model, t2, p2, x2, t1, p1, x1, params):
    # index 2 is the left (primed) factor, index 1 the right one
    s2 = params.sigma**2
    if model in (ModelKind.BlackScholes, ModelKind.HoLee):
        eps = p1 * x2 + s2 * p1 * p2 * t1 + 0.5 * s2 * p2 * p2 * t1 + params.mu * p2 * t1
        if model is ModelKind.HoLee:
            eps += params.beta * t1 * (x2 + 0.5 * s2 * p2 * t1)
        return eps
    lam2 = params.lam**2
    w = params.omega * t1
    if model is ModelKind.Harmonic:
        return 0.5 * (p1 * x2 - x1 * p2) * math.cosh(w) + 0.5 * (
            p1 * p2 / lam2 - lam2 * x1 * x2
        ) * math.sinh(w)
    return 0.5 * (p1 * x2 - x1 * p2) * math.cos(w) + 0.5 * (
        p1 * p2 / lam2 + lam2 * x1 * x2
    ) * math.sin(w)


def cocycle(model: ModelKind, g2: GroupElement, g1: GroupElement, params: ModelParams) -> float:
    """Log fiber twist eps(g2, g1) = ln(zeta'' / (zeta2 zeta1))."""
    model = ModelKind.parse(model)
    params.validate(model)
    return _cocycle(model, g2.t, g2.p, g2.x, g1.t, g1.p, g1.x, params)


def compose(model: ModelKind, g2: GroupElement, g1: GroupElement, params: ModelParams) -> GroupElement:
    """Group product g2 * g1, with g2 the primed (left) factor.

    For the oscillators the numeraire coboundary is omitted, so ``mu`` has
    no effect there.
    """
    model = ModelKind.parse(model)
    M = sl2_generator(model, g1.t, params)
    p = g2.p * M.a + g2.x * M.c + g1.p
    x = g2.p * M.b + g2.x * M.d + g1.x
    eps = _cocycle(model, g2.t, g2.p, g2.x, g1.t, g1.p, g1.x, params)
    return GroupElement(g2.t + g1.t, p, x, g2.zeta * g1.zeta * math.exp(eps))


def inverse(model: ModelKind, g: GroupElement, params: ModelParams) -> GroupElement:
    """Two-sided inverse: base part (-t, -u M(t)^{-1}), fiber fixed by the cocycle."""
    model = ModelKind.parse(model)
    Mi = sl2_generator(model, g.t, params).inverse()
    p = -(g.p * Mi.a + g.x * Mi.c)
    x = -(g.p * Mi.b + g.x * Mi.d)
    eps = _cocycle(model, -g.t, p, x, g.t, g.p, g.x, params)
    return GroupElement(-g.t, p, x, math.exp(-eps) / g.zeta)


def cocycle_identity_residual(model, g3, g2, g1, params) -> float:
    """|eps(g3,g2) + eps(g3 g2, g1) - eps(g3, g2 g1) - eps(g2, g1)|."""
    model = ModelKind.parse(model)
    g32 = compose(model, g3, g2, params)
    g21 = compose(model, g2, g1, params)
    return abs(
        cocycle(model, g3, g2, params)
        + cocycle(model, g32, g1, params)
        - cocycle(model, g3, g21, params)
        - cocycle(model, g2, g1, params)
    )


_OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_residual(M) -> float:
    """Max-norm of M^T Omega M - Omega.  Accepts any 2x2 matrix."""
    A = M.as_array() if isinstance(M, SL2Matrix) else np.asarray(M, dtype=float)
    return float(np.max(np.abs(A.T @ _OMEGA @ A - _OMEGA)))


def hw_compose(gamma: float, w2, w1):
    """Heisenberg-Weyl product of (p, x, theta) triples, w2 primed.

    theta'' = theta + theta' + gamma/2 (p x' - x p')
    """
    p2, x2, th2 = w2
    p1, x1, th1 = w1
    return (p1 + p2, x1 + x2, th1 + th2 + 0.5 * gamma * (p1 * x2 - x1 * p2))
