"""Harmonic and repulsive oscillator potentials.

Hermite modes decay at rate omega (n + 1/2) under the harmonic kernel, the
kernel itself propagates any mode combination exactly, and the small-omega
limit of both oscillator kernels is the plain heat kernel.  Feynman-Kac
with the quadratic potential reproduces both kernels.
"""
import numpy as np

from gqp import ModelParams
from gqp import kernels as kn
from gqp import mc_oracle as mc
from gqp import models as md

osc = ModelParams(0.8, omega=1.0)
for n in (0, 1, 2, 5):
    sol = md.HermiteSolution.mode(n)
    a, b = md.hermite_solution_eval(sol, 0.7, 0.2, osc), md.hermite_solution_eval(sol, 0.7, 0.7, osc)
    print(f"mode {n}: measured decay rate {np.log(a / b) / 0.5:.10f}, omega (n + 1/2) = {n + 0.5}")

sol = md.HermiteSolution((0.3, 0.0, 1.0, -0.2))
x = np.linspace(-1, 1, 5)
prop = kn.propagate("mehler", lambda y: md.hermite_solution_eval(sol, y, 0.0, osc), 0.8, x, osc)
print("kernel propagation vs eigen-expansion:", np.max(np.abs(prop - md.hermite_solution_eval(sol, x, 0.8, osc))))

small = ModelParams(0.8, omega=1e-4)
heat = kn.bs_kernel(0.3, -0.2, 1.0, ModelParams(0.8))
print(f"omega -> 0: Mehler {kn.mehler_kernel(0.3, -0.2, 1.0, small):.10f}, "
      f"repulsive {kn.repulsive_kernel(0.3, -0.2, 1.0, small):.10f}, heat {heat:.10f}")

bump = lambda y: np.exp(-((y - 0.2) ** 2) / 0.5)
for model, kind, p in (("harmonic", "mehler", osc), ("repulsive", "repulsive", ModelParams(0.8, omega=0.9))):
    ps = mc.PathSpec(0.3, 0.0, p.sigma, 1.0, n_paths=40_000, seed=3)
    res = mc.fk_price(model, bump, ps, p)
    ref = kn.propagate(kind, bump, 1.0, 0.3, p)
    print(f"{model:<9} MC {res.estimate:.6f} +- {res.std_error:.1e}, kernel {ref:.6f}")
