"""Command-line entry point: run scenarios, sweeps, checks, and tabulations.

Subcommands:
  run      simulate a scenario config, write the arc CSV and a metrics sidecar
  sweep    re-run a scenario per epsilon and tabulate closeness to the average
  verify   evaluate the averaging identity suite, exit nonzero on failure
  average  tabulate the quadrature average field against the closed form

Exit codes: 0 success, 2 config error, 3 schedule rejected, 4 simulation
escape, 5 verification failure.  Set HAL_LOG=debug|info|warning for logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .automaton import check_schedule, schedule_from_arc
from .averaging import f_bar_eval
from .closeness import min_rho, practical_stability_check
from .errors import (ConfigError, EscapeDetected, HalError, ScheduleInfeasible,
                     ScheduleRejected)
from .identities import run_identity_suite
from .scenarios import load_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCHEDULE = 3
EXIT_ESCAPE = 4
EXIT_VERIFY = 5

log = logging.getLogger("hal")


def _setup_logging():
    level = os.environ.get("HAL_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _add_common(p):
    p.add_argument("config_pos", nargs="?", help="scenario config JSON")
    p.add_argument("--config", dest="config_opt", help="scenario config JSON")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--schedule", default=None, help="switch schedule CSV path")
    p.add_argument("--quad-nodes", type=int, default=None)


def _config_path(args):
    path = args.config_opt or args.config_pos
    if not path:
        raise ConfigError("no config file given (positional or --config)")
    return path


def _overrides(args):
    out = {}
    for key, val in (("epsilon", args.epsilon), ("t_final", args.t_final),
                     ("seed", args.seed), ("schedule", args.schedule),
                     ("quad_nodes", args.quad_nodes)):
        if val is not None:
            out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hal", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write the arc CSV")
    _add_common(p_run)
    p_run.add_argument("--out", required=True, help="arc CSV output path")

    p_sweep = sub.add_parser("sweep", help="closeness-vs-epsilon table")
    _add_common(p_sweep)
    p_sweep.add_argument("--epsilons", required=True,
                         help="comma-separated epsilon values")
    p_sweep.add_argument("--out", required=True, help="sweep CSV output path")
    p_sweep.add_argument("--tol", type=float, default=1e-3,
                         help="bisection tolerance for the closeness radius")

    p_verify = sub.add_parser("verify", help="run the averaging identity suite")
    _add_common(p_verify)

    p_avg = sub.add_parser("average", help="tabulate the average field")
    _add_common(p_avg)
    p_avg.add_argument("--out", required=True, help="table CSV output path")
    p_avg.add_argument("--states", type=int, default=20,
                       help="number of seeded probe states")
    return ap


def _run(args) -> int:
    scenario = load_scenario(_config_path(args), **_overrides(args))
    arc = scenario.run()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    arc.to_csv(out)
    log.info("wrote %s (%d samples, %d jumps)", out, arc.sample_count, arc.num_jumps)

    metrics = {
        "scenario": scenario.name,
        "epsilon": scenario.eps,
        "seed": scenario.seed,
        "t_end": arc.t_end,
        "jumps": arc.num_jumps,
        "final_state": [float(v) for v in arc.last_state()],
        "final_indicator": float(scenario.indicator(arc.last_state())),
    }
    verdict = practical_stability_check(arc, scenario.indicator, nu=0.5,
                                        c_overshoot=2.0, horizon=arc.t_end)
    metrics["stability"] = {
        "nu": verdict.nu,
        "settle_time": verdict.settle_time if math.isfinite(verdict.settle_time) else None,
        "overshoot_ratio": verdict.overshoot_ratio,
        "passed": verdict.passed,
    }
    if scenario.automaton is not None:
        binding = scenario.system.oscillatory
        executed = schedule_from_arc(arc, binding.mode_index)
        sv = check_schedule(executed, executed.mode0, scenario.automaton,
                            horizon=arc.t_end)
        metrics["schedule"] = {
            "adt_ok": sv.adt_ok, "att_ok": sv.att_ok,
            "worst_adt_margin": sv.worst_adt_margin,
            "worst_att_margin": sv.worst_att_margin,
        }
    sidecar = out.with_suffix(out.suffix + ".metrics.json")
    sidecar.write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", sidecar)
    return EXIT_OK


def _sweep(args) -> int:
    path = _config_path(args)
    overrides = _overrides(args)
    epsilons = [float(tok) for tok in args.epsilons.split(",") if tok.strip()]
    if not epsilons:
        raise ConfigError("--epsilons lists no values")
    base = load_scenario(path, **overrides)
    t_final = base.t_final
    avg_arc = base.run_averaged()
    sel = None
    binding = base.system.oscillatory
    if binding is not None and binding.mode_index is not None:
        sel = list(range(binding.n1)) + [binding.mode_index]
    avg_proj = avg_arc.select(sel) if sel else avg_arc

    rows = []
    for eps in epsilons:
        scn = load_scenario(path, **{**overrides, "epsilon": eps})
        steps = scn.t_final / (eps * eps * scn.osc.T2 / scn.step_divisor)
        stride = max(scn.record_every, int(round(steps / 12000.0)) or 1)
        arc = scn.run(record_every=stride)
        proj = arc.select(sel) if sel else arc
        report = min_rho(proj, avg_proj, T=t_final, tol=args.tol)
        rows.append((eps, report.rho_min, t_final))
        log.info("eps=%g rho_min=%g", eps, report.rho_min)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as f:
        f.write("epsilon,rho_min,T\n")
        for eps, rho, T in rows:
            f.write(f"{eps!r},{rho!r},{T!r}\n")
    return EXIT_OK


def _verify(args) -> int:
    scenario = load_scenario(_config_path(args), **_overrides(args))
    results = run_identity_suite(scenario)
    for res in results:
        print(res.line())
    if all(r.passed for r in results):
        print(f"verify {scenario.name}: all {len(results)} checks passed")
        return EXIT_OK
    failed = sum(not r.passed for r in results)
    print(f"verify {scenario.name}: {failed} of {len(results)} checks FAILED")
    return EXIT_VERIFY


def _average(args) -> int:
    scenario = load_scenario(_config_path(args), **_overrides(args))
    states = scenario.random_states(args.states, seed=scenario.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    n1 = scenario.osc.n1
    with open(out, "w", newline="") as f:
        head = [f"x_{i+1}" for i in range(n1)] + ["mode"]
        head += [f"fbar_{i+1}" for i in range(n1)]
        head += [f"analytic_{i+1}" for i in range(n1)] + ["abs_err"]
        f.write(",".join(head) + "\n")
        worst = 0.0
        for (x, mode) in states:
            fb = f_bar_eval(scenario.osc, x, mode, scenario.quad)
            ref = scenario.analytic_average(x, mode)
            err = float(np.max(np.abs(fb - ref)))
            worst = max(worst, err)
            row = [repr(float(v)) for v in x] + [repr(float(mode))]
            row += [repr(float(v)) for v in fb]
            row += [repr(float(v)) for v in ref] + [repr(err)]
            f.write(",".join(row) + "\n")
    print(f"average {scenario.name}: worst |fbar - analytic| = {worst:.3e} "
          f"over {len(states)} states")
    return EXIT_OK


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "sweep":
            return _sweep(args)
        if args.command == "verify":
            return _verify(args)
        if args.command == "average":
            return _average(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScheduleRejected, ScheduleInfeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEDULE
    except EscapeDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESCAPE
    except HalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
