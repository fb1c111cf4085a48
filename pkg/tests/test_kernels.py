import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqp import kernels as kn
from gqp.errors import DomainError, TruncationError
from gqp.group_core import ModelParams, sl2_generator
from gqp.transforms import QuadratureSpec, bromwich_invert, lct_kernel

BS = ModelParams(1.0, r=0.05, mu=0.2)
HL = ModelParams(1.0, mu=0.1, beta=0.5)
OSC = ModelParams(1.0, omega=1.0)
GRID = [(x, xp) for x in np.linspace(-1, 1, 5) for xp in np.linspace(-1, 1, 5)]

# e^{1/6} / sqrt(2 pi), frozen at 18 digits with mpmath
HOLEE_EXAMPLE = 0.471294617084598815


def heat(x, xp, v):
    return math.exp(-((xp - x) ** 2) / (2 * v)) / math.sqrt(2 * math.pi * v)


def test_kind_parse():
    assert kn.KernelKind.parse("harmonic") is kn.KernelKind.Mehler
    assert kn.KernelKind.parse("Black-Scholes") is kn.KernelKind.BS
    assert kn.KernelKind.parse("repulsive_trig") is kn.KernelKind.RepulsiveTrig
    with pytest.raises(DomainError):
        kn.KernelKind.parse("vasicek")


def test_bs_kernel_examples():
    p = ModelParams(1.0)
    assert kn.bs_kernel(0, 0, 1, p) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert kn.bs_kernel(0.3, 0.3 + 0.2, 1, BS) == pytest.approx(math.exp(-0.05) / math.sqrt(2 * math.pi), rel=1e-15)
    # Galilean shift of the heat LCT kernel
    M = sl2_generator("bs", 0.7, BS)
    for x, xp in GRID:
        want = math.exp(-0.05 * 0.7) * lct_kernel(M, x + 0.2 * 0.7, xp)
        assert abs(kn.bs_kernel(x, xp, 0.7, BS) - want) <= 1e-12


@pytest.mark.parametrize("tau", [0.0, -0.5])
def test_forward_time_rejected(tau):
    for kind in kn.KernelKind:
        with pytest.raises(DomainError):
            kn.kernel(kind, 0, 0, tau, ModelParams(1.0, omega=1.0))


def test_bs_normalization_and_mean():
    xs, ws = np.polynomial.legendre.leggauss(200)
    c, sd = kn.kernel_support("bs", 0.4, 1.0, BS)
    y, w = c + 14 * sd * xs, 14 * sd * ws
    k = kn.bs_kernel(0.4, y, 1.0, BS)
    assert abs(np.sum(w * k) - math.exp(-0.05)) <= 1e-12
    assert abs(np.sum(w * k * y) / np.sum(w * k) - (0.4 + 0.2)) <= 1e-8


def test_holee_example():
    p = ModelParams(1.0, beta=1.0)
    assert kn.holee_kernel(0.0, 0.5, 1.0, p) == pytest.approx(HOLEE_EXAMPLE, rel=1e-14)
    assert kn.holee_omega(0.0, 1.0, p) == pytest.approx(math.exp(1 / 6), rel=1e-15)


def test_holee_beta_zero_is_bs():
    p = ModelParams(0.7, mu=0.3, beta=0.0)
    for x, xp in GRID:
        assert kn.holee_kernel(x, xp, 0.8, p) == kn.bs_kernel(x, xp, 0.8, p.replace(r=0.0))


@pytest.mark.parametrize("m,s", [(0.0, 0.5), (0.3, 1.0), (-0.6, 0.3)])
def test_holee_bch_route(m, s):
    payoff = lambda y: np.exp(-((y - m) ** 2) / (2 * s * s))
    for x in (-0.8, 0.0, 0.5):
        want = kn.propagate("holee", payoff, 0.9, x, HL)
        assert abs(kn.holee_bch_apply(payoff, x, 0.9, HL) - want) <= 1e-8


def test_mehler_examples():
    o = ModelParams(0.8, omega=1.3)
    w = 1.3 * 0.6
    assert kn.mehler_kernel(0, 0, 0.6, o) == pytest.approx(o.lam / math.sqrt(2 * math.pi * math.sinh(w)), rel=1e-15)
    assert kn.mehler_kernel(0.3, -0.7, 0.6, o) == kn.mehler_kernel(-0.7, 0.3, 0.6, o)


def test_mehler_equals_lct():
    for tau in (0.2, 1.0, 2.5):
        M = sl2_generator("harmonic", tau, OSC)
        for x, xp in GRID:
            assert abs(kn.mehler_kernel(x, xp, tau, OSC) - lct_kernel(M, x, xp)) <= 1e-12


@pytest.mark.parametrize("kernel_fn", [kn.mehler_kernel, kn.repulsive_kernel])
def test_small_omega_is_heat(kernel_fn):
    p = ModelParams(0.9, omega=1e-4)
    for x in np.linspace(-2, 2, 9):
        for xp in np.linspace(-2, 2, 9):
            assert abs(kernel_fn(x, xp, 1.0, p) - heat(x, xp, 0.81)) <= 1e-6


def test_repulsive_domain_and_symmetry():
    with pytest.raises(DomainError):
        kn.repulsive_kernel(0, 0, math.pi, OSC)
    assert kn.repulsive_kernel(0.2, -0.9, 0.5, OSC) == kn.repulsive_kernel(-0.9, 0.2, 0.5, OSC)
    with pytest.raises(DomainError):
        kn.kernel_support("repulsive", 0.0, 1.7, OSC)


def test_oscillators_need_omega():
    with pytest.raises(DomainError):
        kn.mehler_kernel(0, 0, 1, ModelParams(1.0))
    with pytest.raises(DomainError):
        kn.KernelEval("mehler", ModelParams(1.0))


@pytest.mark.parametrize("kind,params,tol", [
    ("bs", BS, 1e-6),
    ("holee", HL, 1e-5),
    ("mehler", OSC, 1e-5),
    ("repulsive", OSC, 1e-5),
])
def test_pde_residuals(kind, params, tol):
    tau = 1.0 if kind == "bs" else 0.5
    worst = max(kn.pde_residual(kind, x, xp, tau, params) for x, xp in GRID)
    assert worst <= tol


def test_bs_pde_residual_wide_grid():
    for d in np.linspace(-2, 2, 21):
        assert kn.pde_residual("bs", 0.0, d, 1.0, BS) <= 1e-6


def test_pde_residual_detects_wrong_kernel():
    # the harmonic kernel is not a solution of the repulsive equation
    bad = abs(kn.mehler_kernel(0.8, 0.1, 0.5, OSC) - kn.repulsive_kernel(0.8, 0.1, 0.5, OSC))
    assert bad > 1e-3
    k = lambda xx, tt: kn.mehler_kernel(xx, 0.1, tt, OSC)
    kt = (k(0.8, 0.501) - k(0.8, 0.499)) / 0.002
    lk = kn.generator_apply("repulsive", lambda xx: k(xx, 0.5), 0.8, OSC)
    assert abs(kt - lk) > 1e-2


@pytest.mark.parametrize("h", [1e-5, 0.05])
def test_pde_residual_step_range(h):
    with pytest.raises(DomainError):
        kn.pde_residual("bs", 0, 0, 1, BS, h_x=h)


@pytest.mark.parametrize("kind,params,t1,t2,tol", [
    ("bs", BS, 0.5, 0.5, 1e-8),
    ("mehler", OSC, 0.4, 0.6, 1e-7),
    ("holee", HL, 0.5, 0.5, 1e-7),
    ("holee", HL, 0.3, 0.9, 1e-7),
    ("repulsive", OSC, 0.3, 0.4, 1e-7),
])
def test_semigroup(kind, params, t1, t2, tol):
    for x, xp in [(0.0, 0.0), (0.4, -0.3), (-0.9, 0.6)]:
        assert kn.semigroup_residual(kind, x, xp, t1, t2, params) <= tol


def test_semigroup_truncation_detected():
    with pytest.raises(TruncationError):
        kn.semigroup_residual("bs", 0, 0, 0.5, 0.5, BS, QuadratureSpec("real_line", half_width=1.0, nodes=256))


def test_hermite_series_examples():
    o = ModelParams(1.0, omega=1.0)
    tau = 0.8
    zero = kn.hermite_series_kernel(0.5, -0.3, tau, o, n_max=0)
    phi0 = lambda u: math.pi**-0.25 * math.exp(-u * u / 2)
    assert zero == pytest.approx(math.exp(-tau / 2) * phi0(0.5) * phi0(-0.3), rel=1e-14)
    assert abs(kn.hermite_series_kernel(0.5, -0.3, tau, o, 40) - kn.mehler_kernel(0.5, -0.3, tau, o)) <= 1e-6


def test_hermite_series_matches_mehler():
    for w in (0.5, 1.0, 2.0):
        for lam in (0.7, 1.4):
            p = ModelParams(1 / lam, omega=w)  # lam = sqrt(omega) / sigma at tau = 1
            for u, v in [(-2, 2), (0, 1.5), (2, 2), (-1.2, -0.4)]:
                x, xp = u / p.lam, v / p.lam
                err = abs(kn.hermite_series_kernel(x, xp, 1.0, p, 40) - kn.mehler_kernel(x, xp, 1.0, p))
                assert err <= 1e-6


def test_hermite_series_rate():
    p = ModelParams(1.0, omega=1.0)
    x, xp = 0.5, 0.9
    exact = kn.mehler_kernel(x, xp, 1.0, p)
    errs = [abs(kn.hermite_series_kernel(x, xp, 1.0, p, n) - exact) for n in range(4, 25, 4)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 0.5 * a
        assert (b / a) ** 0.25 <= math.exp(-1.0) + 0.05


def test_hermite_series_domain():
    with pytest.raises(DomainError):
        kn.hermite_series_kernel(0, 0, 0.1, OSC)
    with pytest.raises(DomainError):
        kn.hermite_series_kernel(0, 0, 1.0, OSC, n_max=61)


def test_kernel_eval_and_positivity():
    for kind, p, tau in [("bs", BS, 1.0), ("holee", HL, 1.0), ("mehler", OSC, 1.0), ("repulsive", OSC, 1.0)]:
        k = kn.KernelEval(kind, p)
        vals = k(np.linspace(-3, 3, 41), 0.2, tau)
        assert np.all(vals > 0)
        assert vals[7] == kn.kernel(kind, -3 + 7 * 0.15, 0.2, tau, p)


def test_propagate_normalization_and_martingale():
    xs = np.linspace(-0.5, 0.5, 5)
    ones = kn.propagate("bs", lambda y: np.ones_like(y), 0.7, xs, BS)
    assert np.max(np.abs(ones - math.exp(-0.05 * 0.7))) <= 1e-13
    p = ModelParams(0.2, r=0.05, mu=0.05 - 0.02)
    v = kn.propagate("bs", np.exp, 2.0, xs, p)
    assert np.max(np.abs(v / np.exp(xs) - 1)) <= 1e-8
    assert np.shape(kn.propagate("bs", np.exp, 1.0, 0.3, p)) == ()


def test_propagate_expected_log_price():
    tau = 1.3
    for x in (-0.4, 0.0, 1.1):
        m = kn.propagate("bs", lambda y: y, tau, x, BS) / kn.propagate("bs", np.ones_like, tau, x, BS)
        assert abs(m - (x + 0.2 * tau)) <= 1e-8


def test_propagate_call():
    from gqp.models import CallSpec, bs_call_closed
    spec = CallSpec(100, 100, 1.0, 0.2, 0.05)
    p = ModelParams(0.2, r=0.05, mu=0.03)
    v = kn.propagate("bs", lambda y: np.maximum(np.exp(y) - 100, 0), 1.0, math.log(100), p, breaks=(math.log(100),))
    assert abs(v / bs_call_closed(spec) - 1) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(0.2, 1.5))
def test_propagate_matches_hermite_mode(x, tau):
    from gqp.models import HermiteSolution, hermite_solution_eval
    sol = HermiteSolution((0.3, 0.0, 1.0, -0.2))
    got = kn.propagate("mehler", lambda y: hermite_solution_eval(sol, y, 0.0, OSC), tau, x, OSC)
    assert abs(got - hermite_solution_eval(sol, x, tau, OSC)) <= 1e-6


def test_momentum_kernel():
    assert kn.momentum_kernel_bs(0.0, 0.8, BS) == pytest.approx(math.exp(0.05 * 0.8))
    ps = np.linspace(-1, 0.6, 1601)
    e = -np.log(kn.momentum_kernel_bs(ps, 1.0, BS))
    assert ps[np.argmin(e)] == pytest.approx(-0.2, abs=1e-3)


def test_momentum_kernel_bromwich_round_trip():
    tau = 0.9
    F = lambda p: kn.momentum_kernel_bs(p, -tau, BS)
    for d in (-1.5, -0.2, 0.0, 0.4, 1.8):
        got = bromwich_invert(F, x=d)
        assert abs(got - kn.bs_kernel(d, 0.0, tau, BS)) <= 1e-7
