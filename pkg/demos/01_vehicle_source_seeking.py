"""Source-seeking vehicle under intermittent and spoofed measurements.

Runs the two reference switching signals from the two start points: the
nominal-dominant signal steers the vehicle into a small ball around the
target, while the spoofing-dominant attack drives it away.  Trajectories are
written as CSVs that `hal-render --kind vehicle` can plot.
"""

from pathlib import Path

import numpy as np

from hal.automaton import check_schedule, schedule_from_arc
from hal.closeness import practical_stability_check
from hal.scenarios import build_vehicle
from hal.scenarios.vehicle import aggressive_vehicle_params

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

print("building the nominal-dominant run from (-4, 4) ...")
blue, analytic = build_vehicle()
arc_blue = blue.run(record_every=2)
arc_blue.to_csv(OUT / "vehicle_blue.csv")

final = np.linalg.norm(arc_blue.last_state()[:2])
verdict = practical_stability_check(arc_blue, blue.indicator, nu=0.5,
                                    c_overshoot=2.0, horizon=20.0)
print(f"  jumps: {arc_blue.num_jumps}, final |position| = {final:.4f}")
print(f"  practical stability: passed={verdict.passed}, "
      f"settle time = {verdict.settle_time:.2f} s")

executed = schedule_from_arc(arc_blue, blue.system.oscillatory.mode_index)
sv = check_schedule(executed, executed.mode0, blue.automaton, horizon=20.0)
print(f"  executed switching budgets: adt margin {sv.worst_adt_margin:.3f}, "
      f"att margin {sv.worst_att_margin:.3f}")

print("building the spoofing-dominant attack from (-4, -4) ...")
red, _ = build_vehicle(aggressive_vehicle_params())
red.step_divisor = 128
arc_red = red.run(record_every=4)
arc_red.to_csv(OUT / "vehicle_red.csv")
r0 = np.linalg.norm(arc_red.first_state()[:2])
r1 = np.linalg.norm(arc_red.last_state()[:2])
print(f"  jumps: {arc_red.num_jumps}, |position| {r0:.2f} -> {r1:.2f} "
      f"(instability reproduced: {r1 > r0})")

print(f"wrote {OUT/'vehicle_blue.csv'} and {OUT/'vehicle_red.csv'}")
print("render with: hal-render --kind vehicle "
      f"--in {OUT/'vehicle_blue.csv'} --in {OUT/'vehicle_red.csv'} "
      f"--out {OUT/'vehicle.png'}")
