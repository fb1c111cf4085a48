"""Pricing kernels and the checks that pin them down.

Every kernel is validated three ways: it solves its PDE to finite-difference
accuracy, it composes with itself (Chapman-Kolmogorov), and where an
independent construction exists it agrees with that too.
"""
import numpy as np

from gqp import ModelParams
from gqp import kernels as kn
from gqp.group_core import sl2_generator
from gqp.transforms import lct_kernel

cases = {
    "bs": ModelParams(1.0, r=0.05, mu=0.2),
    "holee": ModelParams(1.0, mu=0.1, beta=0.5),
    "mehler": ModelParams(1.0, omega=1.0),
    "repulsive": ModelParams(1.0, omega=1.0),
}
grid = [(x, xp) for x in np.linspace(-1, 1, 5) for xp in np.linspace(-1, 1, 5)]
print(f"{'kernel':<10} {'K(0, 0.3, 0.5)':>16} {'max PDE residual':>18} {'semigroup':>12}")
for kind, p in cases.items():
    res = max(kn.pde_residual(kind, x, xp, 0.5, p) for x, xp in grid)
    sg = kn.semigroup_residual(kind, 0.2, -0.4, 0.3, 0.4, p)
    print(f"{kind:<10} {kn.kernel(kind, 0.0, 0.3, 0.5, p):>16.10f} {res:>18.2e} {sg:>12.2e}")

osc = cases["mehler"]
M = sl2_generator("harmonic", 0.8, osc)
print("\nMehler vs linear canonical transform kernel of M_H(0.8):",
      max(abs(kn.mehler_kernel(x, xp, 0.8, osc) - lct_kernel(M, x, xp)) for x, xp in grid))
print("Mehler vs Hermite eigen-expansion (n <= N):")
for n in (0, 4, 8, 16, 32):
    err = abs(kn.hermite_series_kernel(0.5, 0.9, 0.8, osc, n) - kn.mehler_kernel(0.5, 0.9, 0.8, osc))
    print(f"  N = {n:>2}: {err:.2e}")

hl = cases["holee"]
bump = lambda y: np.exp(-(y - 0.3) ** 2)
print("\nHo-Lee: kernel quadrature vs shift/heat/multiply factorization at x = 0.2:",
      kn.propagate("holee", bump, 0.9, 0.2, hl), kn.holee_bch_apply(bump, 0.2, 0.9, hl))
