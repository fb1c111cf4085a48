"""Invariant suites behind ``gqp verify``.

Each check returns a ``Check`` with the measured residual and the
tolerance it must meet.  All inputs are fixed (seeded where random), so a
report is reproducible bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import group_core as gc
from . import kernels as kn
from . import lie_geometry as lg
from . import models as md
from . import special_functions as sf
from . import transforms as tr
from .group_core import GroupElement, ModelKind, ModelParams
from .mc_oracle import PathSpec, fk_price

__all__ = ["Check", "SUITES", "run"]


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


PARAMS = ModelParams(0.7, r=0.05, mu=0.2, beta=0.5, omega=1.3)


def _random_elements(rng, n):
    t, p, x = rng.uniform(-2, 2, (3, n))
    z = rng.uniform(0.5, 2, n)
    return [GroupElement(*v) for v in zip(t, p, x, z)]


def _group_suite(n=200):
    out = []
    rng = np.random.default_rng(1)
    for m in ModelKind:
        a, b, c = (_random_elements(rng, n) for _ in range(3))
        assoc = ident = inv = 0.0
        for g3, g2, g1 in zip(a, b, c):
            lhs = gc.compose(m, gc.compose(m, g3, g2, PARAMS), g1, PARAMS).log_coords()
            rhs = gc.compose(m, g3, gc.compose(m, g2, g1, PARAMS), PARAMS).log_coords()
            assoc = max(assoc, float(np.max(np.abs(lhs - rhs))))
            ident = max(ident, gc.cocycle_identity_residual(m, g3, g2, g1, PARAMS))
            gi = gc.inverse(m, g1, PARAMS)
            e1 = gc.compose(m, gi, g1, PARAMS).log_coords()
            e2 = gc.compose(m, g1, gi, PARAMS).log_coords()
            inv = max(inv, float(np.max(np.abs(e1))), float(np.max(np.abs(e2))))
        out += [
            Check(f"group.{m.value}.associativity", assoc, 1e-10),
            Check(f"group.{m.value}.cocycle_identity", ident, 1e-10),
            Check(f"group.{m.value}.inverse", inv, 1e-10),
        ]
        sub = max(
            float(np.max(np.abs((gc.sl2_generator(m, t1 + t2, PARAMS).as_array()
                                 - (gc.sl2_generator(m, t1, PARAMS) @ gc.sl2_generator(m, t2, PARAMS)).as_array()))))
            for t1, t2 in rng.uniform(-1, 1, (20, 2))
        )
        out.append(Check(f"group.{m.value}.one_parameter_subgroup", sub, 1e-12))
        out.append(Check(f"group.{m.value}.symplectic", gc.symplectic_residual(gc.sl2_generator(m, 0.9, PARAMS)), 1e-12))
    return out


def _geometry_suite(n=40):
    out = []
    rng = np.random.default_rng(2)
    pts = _random_elements(rng, n)
    for m in ModelKind:
        livf = theta = 0.0
        for g in pts:
            th = lg.connection_theta(m, g, PARAMS)
            for k in lg.INDICES:
                closed = lg.livf_closed(m, k, g, PARAMS)
                livf = max(livf, (lg.livf_numeric(m, k, g, PARAMS) - closed).max_abs())
                if k != "zeta":
                    theta = max(theta, abs(th(closed)))
            theta = max(theta, abs(th(lg.TangentVector(0, 0, 0, 1)) - 1.0))
        g = pts[0]
        mixed = max(
            lg.commutator_numeric(m, i, j, g, PARAMS, "R", "L").max_abs() for i in "tpx" for j in "tpx"
        )
        char = max(float(np.max(np.abs(lg.characteristic_field(m, q, PARAMS) @ lg.curvature(m, q, PARAMS))))
                   for q in pts[:10])
        out += [
            Check(f"geometry.{m.value}.livf_numeric_vs_closed", livf, 1e-6),
            Check(f"geometry.{m.value}.theta_annihilates_livf", theta, 1e-10),
            Check(f"geometry.{m.value}.mixed_brackets", mixed, 1e-5),
            Check(f"geometry.{m.value}.characteristic_in_kernel", char, 1e-8),
        ]
    g = pts[1]
    br = lambda m, i, j, side="L": lg.commutator_numeric(m, i, j, g, PARAMS, side, side).as_array()
    xi = np.array([0, 0, 0, 1.0])
    lam2 = PARAMS.lam**2
    w = PARAMS.omega
    L = lambda m, k: lg.livf_closed(m, k, g, PARAMS).as_array()
    expected = [
        ("bs.[p,x]", br("bs", "p", "x"), -xi),
        ("bs.[t,p]", br("bs", "t", "p"), -PARAMS.sigma**2 * L("bs", "x") - PARAMS.mu * xi),
        ("holee.[t,x]", br("holee", "t", "x"), -PARAMS.beta * xi),
        ("holee.[p,x]", br("holee", "p", "x"), -xi),
        ("harmonic.[t,x]", br("harmonic", "t", "x"), -w * lam2 * L("harmonic", "p")),
        ("harmonic.[t,p]", br("harmonic", "t", "p"), -w / lam2 * L("harmonic", "x")),
        ("harmonic.[p,x]", br("harmonic", "p", "x"), -xi),
        ("repulsive.[t,x]", br("repulsive", "t", "x"), w * lam2 * L("repulsive", "p")),
        ("bs.right.[p,x]", br("bs", "p", "x", "R"), xi),
    ]
    for name, got, want in expected:
        out.append(Check(f"geometry.structure.{name}", float(np.max(np.abs(got - want))), 1e-5))
    flow = lg.characteristic_flow("bs", (1.0, 0.0), 2.0, PARAMS, steps=1000)
    end = flow[-1]
    out.append(Check("geometry.bs.flow_closed_form",
                     abs(end.x - (PARAMS.sigma**2 * 1.0 + PARAMS.mu) * 2.0), 1e-8))
    drift = 0.0
    for m in ModelKind:
        fl = lg.characteristic_flow(m, (0.4, -0.3), 5.0, PARAMS, steps=1000)
        c0 = np.array(fl[0].charges)
        drift = max(drift, max(float(np.max(np.abs(np.array(s.charges) - c0))) for s in fl))
    out.append(Check("geometry.noether_drift", drift, 1e-8))
    return out


def _kernel_suite():
    out = []
    bs = ModelParams(1.0, r=0.05, mu=0.2)
    hl = ModelParams(1.0, mu=0.1, beta=0.5)
    osc = ModelParams(1.0, omega=1.0)
    grid = np.linspace(-2, 2, 9)
    for kind, p, tau, xs in (
        ("bs", bs, 1.0, grid), ("holee", hl, 1.0, grid), ("mehler", osc, 1.0, grid),
        ("repulsive", osc, 0.5, np.linspace(-1, 1, 9)),
    ):
        r = max(float(np.max(kn.pde_residual(kind, xs, xp, tau, p))) for xp in xs)
        out.append(Check(f"kernel.{kind}.pde_residual", r, 1e-5))
    out.append(Check("kernel.bs.semigroup", kn.semigroup_residual("bs", 0.1, 0.4, 0.5, 0.5, bs), 1e-8))
    out.append(Check("kernel.mehler.semigroup", kn.semigroup_residual("mehler", 0.1, 0.4, 0.4, 0.6, osc), 1e-7))
    out.append(Check("kernel.holee.semigroup", kn.semigroup_residual("holee", 0.1, 0.4, 0.5, 0.5, hl), 1e-7))
    X, XP = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9))
    hs = 0.0
    for wt in (0.5, 1.0, 2.0):
        hs = max(hs, float(np.max(np.abs(kn.hermite_series_kernel(X, XP, wt, osc, 40) - kn.mehler_kernel(X, XP, wt, osc)))))
    out.append(Check("kernel.mehler.hermite_series", hs, 1e-6))
    lct = max(abs(tr.lct_kernel(gc.sl2_generator("harmonic", 0.8, osc), a, b) - kn.mehler_kernel(a, b, 0.8, osc))
              for a, b in zip(X.ravel(), XP.ravel()))
    out.append(Check("kernel.mehler.lct_equivalence", lct, 1e-12))
    small = ModelParams(1.0, omega=1e-4)
    heat = kn.bs_kernel(X, XP, 1.0, ModelParams(1.0))
    out.append(Check("kernel.mehler.heat_limit", float(np.max(np.abs(kn.mehler_kernel(X, XP, 1.0, small) - heat))), 1e-6))
    out.append(Check("kernel.repulsive.heat_limit", float(np.max(np.abs(kn.repulsive_kernel(X, XP, 1.0, small) - heat))), 1e-6))
    g = lambda y: np.exp(-((y - 0.3) ** 2) / 0.5)
    bch = float(np.max(np.abs(kn.propagate("holee", g, 1.0, grid, hl) - kn.holee_bch_apply(g, grid, 1.0, hl))))
    out.append(Check("kernel.holee.bch_route", bch, 1e-8))
    norm = abs(kn.propagate("bs", lambda y: np.ones_like(y), 1.0, 0.3, bs) - math.exp(-0.05))
    out.append(Check("kernel.bs.normalization", norm, 1e-9))
    return out


def _transform_suite():
    out = []
    F = lambda p: np.exp(0.5 * p * p - 0.2 * p)
    br = max(abs(tr.bromwich_invert(F, x=x) - kn.bs_kernel(0.2, x, 1.0, ModelParams(1.0))) for x in (-1.0, 0.5, 2.0))
    out.append(Check("transform.bromwich.gaussian", br, 1e-7))
    pole = max(abs(tr.bromwich_invert(lambda p: 1 / (p - 0.5), tr.QuadratureSpec(c=1.0), x, method="fourier")
                   - math.exp(0.5 * x)) for x in (0.5, 1.0, 2.0))
    out.append(Check("transform.bromwich.simple_pole", pole, 1e-6))
    K = 100.0
    z = np.array([1.5, 2.0, 3.0, 2.0 + 1.0j])
    q = tr.QuadratureSpec("real_line", c=math.log(K) + 20, half_width=40, breaks=(math.log(K),))
    mf = tr.mellin_forward(lambda y: np.maximum(y - K, 0), z, q)
    exact = md.call_mellin_transform(z, K)
    out.append(Check("transform.mellin.call", float(np.max(np.abs(mf / exact - 1))), 1e-8))
    f = lambda y: np.exp(-2 * np.log(y) ** 2)
    rt = max(abs(tr.mellin_invert(lambda zz: tr.mellin_forward(f, zz), 0.0, y) - f(y)) for y in (0.5, 1.0, 1.7))
    out.append(Check("transform.mellin.round_trip", rt, 1e-5))
    M1, M2 = gc.SL2Matrix(1, 0.3, 0, 1), gc.SL2Matrix(1, 0.5, 0, 1)
    gauss = lambda y: np.exp(-((y - 0.2) ** 2))
    two = tr.lct_apply(M1, lambda y: tr.lct_apply(M2, gauss, y, on_edge="ignore"), 0.1)
    one = tr.lct_apply(M1 @ M2, gauss, 0.1)
    out.append(Check("transform.lct.composition", abs(two - one), 1e-7))
    w = abs(tr.weierstrass(np.cos, 0.3, 0.4) - tr.lct_apply(gc.SL2Matrix(1, 0.6, 0, 1), np.cos, 0.4))
    out.append(Check("transform.weierstrass_vs_lct", w, 1e-10))
    return out


def _model_suite():
    out = []
    grid = [(k, t) for k in (80.0, 100.0, 120.0) for t in (0.25, 1.0, 2.0)]
    kern = mel = 0.0
    for k, t in grid:
        s = md.CallSpec(100.0, k, t, 0.2, 0.05)
        c = md.bs_call_closed(s)
        kern = max(kern, abs(md.bs_call_kernel(s) / c - 1))
        mel = max(mel, abs(md.bs_call_mellin(s, 2.0) / c - 1))
    out.append(Check("model.call.kernel_route", kern, 1e-6))
    out.append(Check("model.call.mellin_route", mel, 1e-4))
    p = ModelParams(0.3, r=0.05, mu=md.martingale_mu(0.05, 0.3))
    xs = np.linspace(-1, 1, 5)
    mart = float(np.max(np.abs(kn.propagate("bs", np.exp, 1.0, xs, p) / np.exp(xs) - 1)))
    out.append(Check("model.martingale", mart, 1e-8))
    mean = abs(kn.propagate("bs", lambda y: y, 1.5, 0.3, ModelParams(0.4, mu=0.1)) - (0.3 + 0.15))
    out.append(Check("model.expected_log_price", mean, 1e-8))
    ap = ModelParams(math.sqrt(2.0), beta=1.0)
    h = 1e-3
    xg = np.linspace(-3, 3, 13)
    V = lambda x, t: md.airy_mode_eval(md.AiryMode(0.0, 1.0, 0.0), x, t, ap)
    res = np.abs((V(xg, 0.3 + h) - V(xg, 0.3 - h)) / (2 * h) + kn.generator_apply("holee", lambda x: V(x, 0.3), xg, ap))
    out.append(Check("model.airy_mode_pde", float(np.max(res)), 1e-5))
    x = np.linspace(-10, 5, 51)
    a, ad, b, bd = sf.airy_all(x)
    out.append(Check("model.airy_wronskian", float(np.max(np.abs(a * bd - ad * b - 1 / math.pi))), 1e-8))
    bond_p = ModelParams(0.01, beta=-1.0)
    spec = PathSpec(0.03, 0.0, 0.01, 2.0, n_paths=20_000, seed=20240601)
    r = fk_price("holee", lambda y: np.ones_like(y), spec, bond_p)
    out.append(Check("model.holee_bond_mc_in_se", abs(r.estimate - md.holee_bond(0.03, 2.0, bond_p)) / r.std_error, 3.0))
    return out


SUITES: dict[str, Callable[[], list]] = {
    "group": _group_suite,
    "geometry": _geometry_suite,
    "kernel": _kernel_suite,
    "transform": _transform_suite,
    "model": _model_suite,
}


def run(only=None) -> list[Check]:
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    checks = []
    for n in names:
        checks.extend(SUITES[n]())
    return checks
