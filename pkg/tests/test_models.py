import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqp import models as md
from gqp.errors import DomainError, TruncationError
from gqp.group_core import ModelParams
from gqp.kernels import bs_kernel, generator_apply, holee_kernel

# frozen at 18 digits with mpmath
CALL_ATM = 10.4505835721855668
BOND_EXAMPLE = 0.941890110560338975  # exp(-0.06 + 1e-4 * 8 / 6)


def fd_residual(kind, V, x, t, params, h=1e-3, forward=True):
    """Residual of V_t + L V = 0 (forward=True) or V_tau - L V = 0."""
    vt = (V(x, t + h) - V(x, t - h)) / (2 * h)
    lv = generator_apply(kind, lambda xx: V(xx, t), x, params, h)
    return np.abs(vt + lv) if forward else np.abs(vt - lv)


def test_martingale_mu():
    assert md.martingale_mu(0.0, math.sqrt(2)) == pytest.approx(-1.0, abs=1e-15)
    assert md.martingale_mu(0.08, 0.4) == pytest.approx(0.0, abs=1e-16)
    assert md.martingale_mu(0.05, 0.2) == pytest.approx(0.03, abs=1e-16)
    with pytest.raises(DomainError):
        md.martingale_mu(0.05, 0.0)


def test_call_spec_validation():
    with pytest.raises(DomainError):
        md.CallSpec(100, -1, 1, 0.2)
    with pytest.raises(DomainError):
        md.CallSpec(100, 100, 1, 0.2, float("nan"))
    assert md.CallSpec(110, 100, 1, 0.2).log_moneyness == pytest.approx(math.log(1.1))


def test_call_closed_oracle():
    assert md.bs_call_closed(md.CallSpec(100, 100, 1, 0.2, 0.05)) == pytest.approx(CALL_ATM, rel=1e-13)
    assert md.bs_call_closed(md.CallSpec(100, 1e-9, 1, 0.2, 0.05)) == pytest.approx(100, rel=1e-9)
    assert md.bs_call_closed(md.CallSpec(1, 1, 1, 1e-10, 0.0)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(50, 150), st.floats(50, 150), st.floats(0.1, 3), st.floats(0.05, 0.8), st.floats(0, 0.1))
def test_call_bounds_and_monotonicity(s, k, t, v, r):
    c = md.bs_call_closed(md.CallSpec(s, k, t, v, r))
    assert max(s - k * math.exp(-r * t), 0) - 1e-9 <= c <= s
    assert md.bs_call_closed(md.CallSpec(s * 1.01, k, t, v, r)) >= c
    assert md.bs_call_closed(md.CallSpec(s, k, t, v * 1.05, r)) >= c


@pytest.mark.parametrize("k", [80, 100, 120])
@pytest.mark.parametrize("tau", [0.25, 1, 2])
def test_call_routes(k, tau):
    spec = md.CallSpec(100, k, tau, 0.2, 0.05)
    ref = md.bs_call_closed(spec)
    assert abs(md.bs_call_kernel(spec) / ref - 1) <= 1e-6
    assert abs(md.bs_call_mellin(spec, c=2.0) / ref - 1) <= 1e-4


def test_mellin_contour_independence():
    spec = md.CallSpec(100, 100, 1, 0.2, 0.05)
    assert abs(md.bs_call_mellin(spec, c=1.5) - md.bs_call_mellin(spec, c=3.0)) <= 1e-6


def test_mellin_deep_otm():
    spec = md.CallSpec(100, 1000, 1, 0.2, 0.05)
    ref = md.bs_call_closed(spec)
    assert ref > 0
    assert abs(md.bs_call_mellin(spec, c="saddle") / ref - 1) <= 1e-3
    assert md.saddle_abscissa(spec) > 50


def test_mellin_contour_violation():
    with pytest.raises(DomainError):
        md.bs_call_mellin(md.CallSpec(100, 100, 1, 0.2), c=1.0)


def test_mellin_drift_convention():
    spec = md.CallSpec(100, 100, 1, 0.2, 0.05)
    ref = md.bs_call_closed(spec)
    assert abs(md.bs_call_mellin(spec, mu=0.05 - 0.02) / ref - 1) <= 1e-10
    # the literal drift 1 - sigma^2/2 does not price this call
    assert abs(md.bs_call_mellin(spec, mu=1 - 0.02) / ref - 1) > 1.0


def test_call_transform():
    assert md.call_mellin_transform(2.0, 100.0) == pytest.approx(0.005)


def test_holee_bond_examples():
    p = ModelParams(0.01, mu=0.0)
    assert md.holee_bond(0.03, 2.0, p) == pytest.approx(BOND_EXAMPLE, rel=1e-15)
    assert md.holee_bond(0.03, 0.0, p) == 1.0
    with pytest.raises(DomainError):
        md.holee_bond(0.03, -1.0, p)


def test_holee_bond_pde():
    p = ModelParams(0.3, mu=0.02, beta=-1.0)
    V = lambda x, t: md.holee_bond(x, t, p)
    for x in np.linspace(-0.1, 0.1, 5):
        assert fd_residual("holee", V, x, 1.5, p, forward=False) <= 1e-6


def test_holee_bond_polynomial_fit():
    x, mu, s = 0.04, 0.003, 0.02
    p = ModelParams(s, mu=mu)
    taus = np.linspace(0.1, 5, 40)
    logb = np.log(md.holee_bond(x, taus, p))
    c3, c2, c1, c0 = np.polyfit(taus, logb, 3)
    assert abs(c1 + x) <= 1e-9
    assert abs(c2 + mu / 2) <= 1e-9
    assert abs(c3 - s * s / 6) <= 1e-9
    assert abs(c0) <= 1e-9


def test_airy_variable():
    p = ModelParams(math.sqrt(2), beta=1.0)
    assert md.airy_variable(0.7, 0.0, p) == pytest.approx(-0.7, rel=1e-14)
    with pytest.raises(DomainError):
        md.airy_variable(0.0, 0.0, ModelParams(1.0))


@pytest.mark.parametrize("params,modes", [
    (ModelParams(math.sqrt(2), beta=1.0), [md.AiryMode(0.0, 1.0, 0.0)]),
    (ModelParams(0.8, mu=0.3, beta=0.7), [md.AiryMode(0.4, 1.0, 0.5)]),
    (ModelParams(0.8, mu=-0.2, beta=-1.3), [md.AiryMode(0.4, 1.0, 0.0), md.AiryMode(-0.9, 0.3, 0.2)]),
])
def test_airy_modes_solve_holee(params, modes):
    V = lambda x, t: md.airy_mode_eval(modes, x, t, params)
    x = np.linspace(-1, 1, 11)
    scale = np.maximum(1.0, np.abs(V(x, 0.3)))
    assert np.max(fd_residual("holee", V, x, 0.3, params) / scale) <= 1e-5


def test_airy_mode_zero_and_range():
    p = ModelParams(1.0, beta=1.0)
    assert md.airy_mode_eval(md.AiryMode(0.3, 0.0, 0.0), 0.5, 0.0, p) == 0.0
    with pytest.raises(DomainError):
        md.airy_mode_eval(md.AiryMode(0.0), 40.0, 0.0, p)
    with pytest.raises(DomainError):
        md.AiryMode(float("inf"))


def test_hermite_mode_decay():
    p = ModelParams(0.7, omega=1.3)
    x = np.linspace(-2, 2, 9)
    for n in (0, 2, 5):
        sol = md.HermiteSolution.mode(n)
        a = md.hermite_solution_eval(sol, 1.1, 0.4, p)
        b = md.hermite_solution_eval(sol, 1.1, 0.9, p)
        assert abs(math.log(a / b) / 0.5 - 1.3 * (n + 0.5)) <= 1e-8
    s0 = md.HermiteSolution.mode(0)
    ratio = md.hermite_solution_eval(s0, x, 0.6, p) / md.hermite_solution_eval(s0, x, 0.0, p)
    assert np.max(np.abs(ratio - math.exp(-1.3 * 0.3))) <= 1e-14


def test_hermite_solution_pde():
    p = ModelParams(0.9, omega=1.1)
    sol = md.HermiteSolution((1.0, -0.4, 0.25, 0.0, 0.1))
    V = lambda x, t: md.hermite_solution_eval(sol, x, t, p)
    x = np.linspace(-2, 2, 9)
    assert np.max(fd_residual("mehler", V, x, 0.5, p, forward=False)) <= 1e-5


def test_hermite_solution_length():
    with pytest.raises(DomainError):
        md.HermiteSolution(())
    with pytest.raises(DomainError):
        md.HermiteSolution((1.0,) * 62)


def test_numeraire_gauge():
    p = ModelParams(0.5, r=0.04, mu=0.1)
    vp = 0.3
    x = np.linspace(-1, 1, 7)
    v = np.cos(x)
    assert np.array_equal(md.numeraire_gauge(v, x, 0.4, 0.0, p), v)
    # Phi = e^{r t + eps} solves the boosted equation
    boosted = p.replace(mu=p.mu + vp)
    Phi = lambda xx, t: np.exp(p.r * t + md.gauge_exponent(xx, t, vp, p))
    assert np.max(fd_residual("bs", Phi, x, 0.4, boosted) / Phi(x, 0.4)) <= 1e-8
    # a boosted kernel solution, gauged, solves the original equation
    T = 1.0
    Vb = lambda xx, t: bs_kernel(xx, 0.2, T - t, boosted)
    Vo = lambda xx, t: md.numeraire_gauge(Vb(xx, t), xx, t, vp, p)
    assert np.max(fd_residual("bs", Vo, x, 0.4, p)) <= 1e-5
    # without the gauge the boosted solution fails the original equation
    assert np.max(fd_residual("bs", Vb, x, 0.4, p)) > 1e-2
    with pytest.raises(DomainError):
        md.numeraire_gauge(np.ones(3), np.ones(4), 0.0, vp, p)


def test_similarity_map_kernel_slice():
    p = ModelParams(0.8, mu=0.1, beta=0.37)
    tau, xp = 0.9, 0.25
    grid = np.linspace(-4, 4, 1601)
    vbs = bs_kernel(grid, xp, tau, p.replace(r=0.0))
    xo = np.linspace(-1.5, 1.5, 31)
    got = md.holee_similarity_map(vbs, grid, tau, p, xo)
    assert np.max(np.abs(got - holee_kernel(xo, xp, tau, p))) <= 1e-6


def test_similarity_map_constant_and_identity():
    p = ModelParams(0.8, mu=0.1, beta=0.5)
    grid = np.linspace(-3, 3, 121)
    got = md.holee_similarity_map(np.ones_like(grid), grid, 0.7, p, np.linspace(-1, 1, 5))
    from gqp.kernels import holee_omega
    assert np.max(np.abs(got - holee_omega(np.linspace(-1, 1, 5), 0.7, p))) <= 1e-12
    v = np.sin(grid)
    assert np.array_equal(md.holee_similarity_map(v, grid, 0.7, p.replace(beta=0.0)), v)
    with pytest.raises(TruncationError):
        md.holee_similarity_map(v, grid, 0.7, p, [2.99])
    with pytest.raises(TruncationError):
        md.holee_similarity_map(v, grid, 40.0, p)


def test_similarity_map_solves_holee():
    p = ModelParams(0.8, mu=0.1, beta=0.5)
    grid = np.linspace(-4, 4, 801)
    T, xp = 1.5, 0.1
    V = lambda xx, t: md.holee_similarity_map(bs_kernel(grid, xp, T - t, p.replace(r=0.0)), grid, T - t, p, xx)
    x = np.linspace(-1, 1, 9)
    assert np.max(fd_residual("holee", V, x, 0.5, p, h=1e-2)) <= 1e-4
