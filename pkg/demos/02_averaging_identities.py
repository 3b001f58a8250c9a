"""What the averaging engine computes, piece by piece.

Walks one state of the vehicle scenario through the full chain: the running
integral u1, the bracket and its split kernels, the intermediate average
h_bar, the full second-order average f_bar, and the (vanishing) first-order
average that explains why second order is needed at all.  Ends with the
identity suite over all four scenarios.
"""

import numpy as np

from hal.averaging import (QuadratureConfig, f_bar_eval, first_order_average,
                           h_bar_eval, lie_bracket_x, psi_eval, u1_eval)
from hal.identities import run_identity_suite
from hal.scenarios import (build_es_affine, build_sphere_es, build_sync,
                           build_vehicle, r2_params)

quad = QuadratureConfig()
scn, analytic = build_vehicle()

x = np.array([1.0, 1.0, np.cos(0.7), np.sin(0.7)])
mode = 3.0
tau = (0.9, 2.4)

print("state: position (1, 1), nominal mode")
print("  u1          =", np.round(u1_eval(scn.osc, x, mode, *tau, quad), 6))
print("  bracket     =", np.round(lie_bracket_x(scn.osc, x, mode, tau, quad), 6))
psi_m, psi_p = psi_eval(scn.osc, x, mode, tau, quad)
print("  psi_m/psi_p =", np.round(psi_m, 6), np.round(psi_p, 6))
print("  h_bar       =", np.round(h_bar_eval(scn.osc, x, mode, tau[0], quad), 6))
print("  first-order average:", np.round(
    first_order_average(scn.osc, x, mode, tau[0], quad), 12),
    "(zero: no conclusion at first order)")
fb = f_bar_eval(scn.osc, x, mode, quad)
print("  second-order average:", np.round(fb, 8))
print("  closed form         :", np.round(analytic(x, mode), 8))

print("\nidentity suite over every scenario:")
for name, built in [
    ("vehicle", (scn, analytic)),
    ("sync", build_sync(r2_params())),
    ("es-affine", build_es_affine()),
    ("sphere", build_sphere_es()),
]:
    scenario, _ = built
    print(f"--- {name}")
    for res in run_identity_suite(scenario, n_states=3, seed=0):
        print("   ", res.line())
