"""How close does the oscillatory run track its averaged system?

Simulates the vehicle at several timescale parameters under one fixed
switching signal, simulates the averaged hybrid system once under the same
signal, and reports the smallest closeness radius per epsilon.  The radius
shrinks as the oscillations get faster.
"""

import numpy as np

from hal.closeness import min_rho
from hal.scenarios import build_vehicle
from hal.scenarios.vehicle import VehicleParams

T = 12.0

base, _ = build_vehicle(VehicleParams(t_final=T))
print("simulating the averaged system once ...")
avg_arc = base.run_averaged()
avg_proj = avg_arc.select(["x_1", "x_2", "z1"])

print(f"{'epsilon':>8} {'rho_min':>8}")
for eps in (0.2, 0.1, 0.05):
    scn, _ = build_vehicle(VehicleParams(eps=eps, t_final=T))
    steps = T / (eps * eps * scn.osc.T2 / scn.step_divisor)
    stride = max(1, int(round(steps / 8000.0)))
    arc = scn.run(record_every=stride)
    proj = arc.select(["x_1", "x_2", "z1"])
    report = min_rho(proj, avg_proj, T=T, tol=1e-3)
    print(f"{eps:8.3f} {report.rho_min:8.4f}")
    if report.witness:
        (t, j), (s, _), d = report.witness
        print(f"         worst match: (t={t:.3f}, j={j}) vs s={s:.3f}, "
              f"distance {d:.4f}")
