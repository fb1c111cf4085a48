"""Invariant vector fields, the connection form and classical flows.

Left-invariant fields are the derivative of the group law in its right
factor at the identity.  The connection form Theta annihilates all of
them, the characteristic field spans the kernel of its curvature, and the
flow of that field conserves the Noether charges built from the
right-invariant fields.
"""
import numpy as np

from gqp import GroupElement, ModelParams
from gqp import lie_geometry as lg

params = ModelParams(0.7, r=0.05, mu=0.2, beta=0.5, omega=1.3)
g = GroupElement(0.4, 0.3, -0.7)

for model in ("bs", "holee", "harmonic", "repulsive"):
    print(f"== {model}")
    th = lg.connection_theta(model, g, params)
    for k in lg.INDICES:
        X = lg.livf_closed(model, k, g, params)
        Xn = lg.livf_numeric(model, k, g, params)
        print(f"  X_{k:<4} = {np.round(X.as_array(), 6).tolist()}  "
              f"|numeric - closed| = {(Xn - X).max_abs():.1e}  Theta(X) = {th(X):+.1e}")
    br = lg.commutator_numeric(model, "p", "x", g, params, "L", "L")
    print(f"  [X_p, X_x] = {np.round(br.as_array(), 6).tolist()}   (minus the fiber generator)")
    flow = lg.characteristic_flow(model, (0.4, -0.3), 5.0, params, steps=1000)
    c0 = np.array(flow[0].charges)
    drift = max(np.max(np.abs(np.array(s.charges) - c0)) for s in flow)
    print(f"  flow to t = 5: p = {flow[-1].p:+.6f}, x = {flow[-1].x:+.6f}; charge drift {drift:.1e}")

# The harmonic SL(2,R) block diagonalizes into decoupled growth/decay modes.
R = lg.diagonalizer(params.lam)
from gqp.group_core import sl2_generator
M = sl2_generator("harmonic", 0.8, params).as_array()
print("\nR M_H(0.8) R^-1 =\n", np.round(R @ M @ np.linalg.inv(R), 12))
print("exp(-+ omega t) =", np.exp(-params.omega * 0.8), np.exp(params.omega * 0.8))
