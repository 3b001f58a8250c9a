"""Ready-to-simulate application scenarios and JSON config loading."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..automaton import AutomatonConfig, SwitchSchedule
from ..errors import ConfigError
from .base import ScenarioSystem, quadratic_cost
from .es_affine import EsAffineParams, build_es_affine, excitation_matrix, probe_excitation
from .sphere import (SphereEsParams, build_sphere_es, estimate_synergy_gap,
                     geodesic_distance, hysteresis_gap, spurious_critical_point,
                     synergistic_eval, warped_cost)
from .sync import (SyncParams, build_sync, pairwise_sync_error, r2_params,
                   r4_params)
from .vehicle import (AGGRESSIVE_AUTOMATON, AGGRESSIVE_SCHEDULE,
                      DEFAULT_AUTOMATON, NOMINAL_SCHEDULE, VehicleParams,
                      aggressive_vehicle_params, build_vehicle)

__all__ = [
    "ScenarioSystem", "VehicleParams", "SyncParams", "EsAffineParams",
    "SphereEsParams", "build_vehicle", "build_sync", "build_es_affine",
    "build_sphere_es", "load_scenario", "pairwise_sync_error",
    "geodesic_distance", "synergistic_eval", "estimate_synergy_gap",
    "NOMINAL_SCHEDULE", "AGGRESSIVE_SCHEDULE", "DEFAULT_AUTOMATON",
    "AGGRESSIVE_AUTOMATON",
]

BUILDERS = {
    "vehicle": build_vehicle,
    "sync": build_sync,
    "es-affine": build_es_affine,
    "sphere": build_sphere_es,
}


def _parse_epsilon(raw) -> float:
    if isinstance(raw, (int, float)):
        if raw <= 0:
            raise ConfigError("epsilon must be positive")
        return float(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return float(Fraction(int(raw[0]), int(raw[1])))
    raise ConfigError(f"cannot parse epsilon value {raw!r}")


def _parse_frequencies(raw):
    if raw is None:
        return None
    out = []
    for w in raw:
        if isinstance(w, (list, tuple)) and len(w) == 2:
            out.append(Fraction(int(w[0]), int(w[1])))
        else:
            out.append(Fraction(w))
    return out


def _parse_cost(raw, n):
    if raw is None:
        return None, None
    if raw.get("type", "quadratic") != "quadratic":
        raise ConfigError(f"unknown cost type {raw.get('type')!r}")
    weights = raw.get("weights", [1.0] * n)
    center = raw.get("center", [0.0] * n)
    return quadratic_cost(weights, center)


def _parse_automaton(raw) -> AutomatonConfig:
    try:
        modes = raw.get("modes")
        qs = tuple(raw["Qs"])
        qu = tuple(raw.get("Qu", ()))
        if modes is None:
            modes = tuple(sorted(set(qs) | set(qu)))
        return AutomatonConfig(
            modes=tuple(modes), stable=qs, unstable=qu,
            eta1=float(raw["eta1"]), eta2=float(raw["eta2"]),
            N0=int(raw["N0"]), T0=float(raw["T0"]))
    except KeyError as exc:
        raise ConfigError(f"automaton config missing key {exc}") from exc


def _parse_schedule(raw, base_dir: Path, mode0) -> SwitchSchedule:
    if isinstance(raw, str):
        path = (base_dir / raw).resolve()
        if not path.exists():
            raise ConfigError(f"schedule file not found: {path}")
        return SwitchSchedule.from_csv(path, mode0=mode0)
    if isinstance(raw, list):
        return SwitchSchedule([(float(t), int(m)) for t, m in raw], mode0=mode0)
    raise ConfigError(f"cannot parse schedule {raw!r}")


def load_scenario(config_path, **overrides) -> ScenarioSystem:
    """Build a scenario from a JSON config file.

    Recognized override keywords: ``epsilon``, ``t_final``, ``seed``,
    ``schedule`` (path), ``quad_nodes``.
    """
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    name = raw.get("scenario")
    if name not in BUILDERS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(BUILDERS)}")

    eps = _parse_epsilon(overrides.get("epsilon", raw.get("epsilon", 0.1)))
    t_final = float(overrides.get("t_final", raw.get("t_final", 20.0)))
    seed = int(overrides.get("seed", raw.get("seed", 0)))
    # schedule paths inside the config resolve against the config file;
    # a caller-supplied override resolves against the working directory
    base_dir = Path.cwd() if "schedule" in overrides else path.parent
    solver = raw.get("solver", {})

    if name == "vehicle":
        mode0 = int(raw.get("mode0", 3))
        cost, grad = _parse_cost(raw.get("cost"), 2)
        automaton = _parse_automaton(raw["automaton"]) if "automaton" in raw \
            else DEFAULT_AUTOMATON
        sched_raw = overrides.get("schedule", raw.get("schedule"))
        schedule = _parse_schedule(sched_raw, base_dir, mode0) \
            if sched_raw is not None else NOMINAL_SCHEDULE
        params = VehicleParams(
            eps=eps, cost=cost, cost_grad=grad, schedule=schedule,
            automaton=automaton, x0=raw.get("x0", (-4.0, 4.0)),
            heading0=float(raw.get("heading0", 0.0)),
            t_final=t_final, seed=seed)
        scenario, _ = build_vehicle(params)
    elif name == "sync":
        mode0 = int(raw.get("mode0", 1))
        graphs = raw.get("graphs")
        if graphs is not None:
            graphs = tuple(tuple((int(a) - 1, int(b) - 1) for a, b in g)
                           for g in graphs)  # configs use 1-based node ids
        directions = raw.get("directions")
        sched_raw = overrides.get("schedule", raw.get("schedule"))
        kwargs = dict(eps=eps, t_final=t_final, seed=seed,
                      frequencies=_parse_frequencies(raw.get("frequencies")))
        if graphs is not None:
            kwargs["graphs"] = graphs
        if directions is not None:
            kwargs["directions"] = tuple(tuple(d) for d in directions)
        if raw.get("r") is not None:
            kwargs["r"] = int(raw["r"])
        if "automaton" in raw:
            kwargs["automaton"] = _parse_automaton(raw["automaton"])
        if sched_raw is not None:
            kwargs["schedule"] = _parse_schedule(sched_raw, base_dir, mode0)
        if raw.get("xi0") is not None:
            kwargs["xi0"] = np.asarray(raw["xi0"], dtype=float)
        params = SyncParams(**{k: v for k, v in kwargs.items() if v is not None})
        scenario, _ = build_sync(params)
    elif name == "es-affine":
        mode0 = int(raw.get("mode0", 3))
        n = int(raw.get("n", 2))
        cost, grad = _parse_cost(raw.get("cost"), n)
        automaton = _parse_automaton(raw["automaton"]) if "automaton" in raw \
            else DEFAULT_AUTOMATON
        sched_raw = overrides.get("schedule", raw.get("schedule"))
        schedule = _parse_schedule(sched_raw, base_dir, mode0) \
            if sched_raw is not None else NOMINAL_SCHEDULE
        params = EsAffineParams(
            n=n, frequencies=_parse_frequencies(raw.get("frequencies")),
            cost=cost, cost_grad=grad, eps=eps, schedule=schedule,
            automaton=automaton, x0=raw.get("x0"), t_final=t_final, seed=seed)
        scenario, _ = build_es_affine(params)
    else:  # sphere
        params = SphereEsParams(
            frequencies=_parse_frequencies(raw.get("frequencies")) or (3, 2, 1),
            delta=float(raw.get("delta", 0.2)),
            eps=eps, x0=raw.get("x0"), mode0=int(raw.get("mode0", 1)),
            t_final=t_final, seed=seed)
        scenario, _ = build_sphere_es(params)

    if "step_divisor" in solver:
        scenario.step_divisor = int(solver["step_divisor"])
    if "record_every" in solver:
        scenario.record_every = int(solver["record_every"])
    if "j_max" in solver:
        scenario.j_max = int(solver["j_max"])
    if "quad_nodes" in overrides and overrides["quad_nodes"]:
        from ..averaging import QuadratureConfig
        n = int(overrides["quad_nodes"])
        scenario.quad = QuadratureConfig(nodes_tau1=n, nodes_tau2=n)
    return scenario
