"""Ho-Lee short rate: bond, kernel, similarity map and Airy modes.

The zero-coupon bond is the beta = -1 member of the Omega_beta family and
matches a pathwise-discounted Monte Carlo.  The Ho-Lee kernel is a
Black-Scholes heat kernel evaluated at a shifted point and multiplied by
Omega_beta, which is exactly what the similarity map does to sampled data.
"""
import numpy as np

from gqp import ModelParams
from gqp import kernels as kn
from gqp import mc_oracle as mc
from gqp import models as md

bond = ModelParams(0.01, mu=0.002, beta=-1.0)
ps = mc.PathSpec(0.03, bond.mu, bond.sigma, 2.0, n_paths=100_000, seed=11)
res = mc.fk_price("holee", lambda y: np.ones_like(y), ps, bond)
exact = md.holee_bond(0.03, 2.0, bond)
print(f"bond(x=3%, 2y): closed {exact:.8f}, MC {res.estimate:.8f} +- {res.std_error:.1e}, "
      f"z = {(res.estimate - exact) / res.std_error:+.2f}")

taus = np.linspace(0.1, 5, 30)
coef = np.polyfit(taus, np.log(md.holee_bond(0.03, taus, bond)), 3)
print("log bond cubic fit (tau^3, tau^2, tau, 1):", np.round(coef, 10),
      " expected", (bond.sigma**2 / 6, -bond.mu / 2, -0.03, 0.0))

p = ModelParams(0.8, mu=0.1, beta=0.5)
grid = np.linspace(-4, 4, 1601)
xo = np.linspace(-1, 1, 5)
mapped = md.holee_similarity_map(kn.bs_kernel(grid, 0.25, 0.9, p.replace(r=0)), grid, 0.9, p, xo)
print("similarity map vs Ho-Lee kernel:", np.max(np.abs(mapped - kn.holee_kernel(xo, 0.25, 0.9, p))))

modes = [md.AiryMode(0.4, 1.0, 0.5), md.AiryMode(-0.9, 0.3, 0.2)]
V = lambda x, t: md.airy_mode_eval(modes, x, t, p)
x = np.linspace(-1, 1, 5)
vt = (V(x, 0.301) - V(x, 0.299)) / 2e-3
print("Airy superposition PDE residual:", np.max(np.abs(vt + kn.generator_apply("holee", lambda y: V(y, 0.3), x, p))))
