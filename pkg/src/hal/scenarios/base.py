"""Shared scaffolding for the ready-to-run application scenarios.

Every scenario packages an oscillatory flow, the automaton/schedule data it
switches under, the executable original system (state layout
``[x | z-block | tau1, tau2]``), an independent closed-form average for
cross-validation, and an indicator measuring distance to the target set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..arcs import HybridArc
from ..automaton import AutomatonConfig, SwitchSchedule, automaton_embed
from ..averaging import QuadratureConfig, build_average_system
from ..closeness import IndicatorSpec
from ..errors import HalError
from ..oscillatory import OscillatoryFlowSpec
from ..simulate import simulate
from ..systems import (HybridSystemSpec, OscillatoryBinding, SolverConfig,
                       oscillatory_step)


def mode_value(z) -> float:
    """Logic mode from either a scalar z or a z-block array."""
    arr = np.atleast_1d(np.asarray(z, dtype=float))
    return float(arr[0])


@dataclass
class ScenarioSystem:
    """A built scenario: original hybrid system plus its analysis data."""

    name: str
    osc: OscillatoryFlowSpec
    eps: float
    system: HybridSystemSpec
    analytic_average: Callable[[np.ndarray, float], np.ndarray]
    indicator: IndicatorSpec
    x0: np.ndarray
    columns: tuple[str, ...]
    automaton: Optional[AutomatonConfig] = None
    schedule: Optional[SwitchSchedule] = None
    t_final: float = 20.0
    seed: int = 0
    step_divisor: int = 64
    j_max: int = 200
    record_every: int = 1
    projection: Optional[Callable[[np.ndarray], np.ndarray]] = None
    priority: str = "schedule"
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    affine_decomposition: Optional[tuple] = None  # (bs, vs) when phi1 splits
    sample_state: Optional[Callable[[np.random.Generator], tuple]] = None

    @property
    def n1(self) -> int:
        return self.osc.n1

    def solver_config(self, t_final=None, seed=None, record_every=None,
                      step=None, j_max=None) -> SolverConfig:
        return SolverConfig(
            step=step if step is not None else oscillatory_step(
                self.eps, self.osc.T2, self.step_divisor),
            t_final=t_final if t_final is not None else self.t_final,
            j_max=j_max if j_max is not None else self.j_max,
            priority=self.priority,
            projection=self.projection,
            seed=seed if seed is not None else self.seed,
            record_every=record_every if record_every is not None else self.record_every,
        )

    def initial_state(self) -> np.ndarray:
        return np.asarray(self.x0, dtype=float).copy()

    def run(self, **overrides) -> HybridArc:
        """Simulate the original oscillatory system."""
        cfg = self.solver_config(**overrides)
        meta = {"scenario": self.name, "epsilon": repr(self.eps),
                "seed": str(cfg.seed)}
        return simulate(self.system, self.initial_state(), cfg,
                        columns=self.columns, meta=meta)

    def averaged_system(self, quad: Optional[QuadratureConfig] = None) -> HybridSystemSpec:
        return build_average_system(self.system, quad or self.quad)

    def run_averaged(self, step: float = 0.05, t_final=None, quad=None,
                     record_every: int = 1) -> HybridArc:
        """Simulate the averaged system under the same jump schedule.

        The default quadrature is lighter than the analysis default: the
        scenario integrands are low-order trig polynomials in both timers,
        for which the period trapezoid rule is already exact at these node
        counts, and the integration error of the slow flow dominates.
        """
        if quad is None:
            quad = QuadratureConfig(nodes_tau1=32, nodes_tau2=64,
                                    fd_step=self.quad.fd_step)
        avg = self.averaged_system(quad)
        nred = avg.n
        cfg = SolverConfig(
            step=step,
            t_final=t_final if t_final is not None else self.t_final,
            j_max=self.j_max,
            priority=self.priority,
            projection=self._reduced_projection(nred),
            seed=self.seed,
            record_every=record_every,
        )
        x0 = self.initial_state()[:nred]
        meta = {"scenario": self.name + "-averaged", "epsilon": repr(self.eps),
                "seed": str(self.seed)}
        cols = self.columns[:nred]
        return simulate(avg, x0, cfg, columns=cols, meta=meta)

    def _reduced_projection(self, nred):
        if self.projection is None:
            return None
        full_projection = self.projection
        pad_n = self.system.n - nred

        def proj(state):
            padded = np.concatenate([state, np.zeros(pad_n)])
            return full_projection(padded)[:nred]
        return proj

    def random_states(self, count: int, seed: int = 0):
        """Seeded (x, z-mode) probe states for average-field comparisons."""
        if self.sample_state is None:
            raise HalError(f"scenario {self.name} has no state sampler")
        rng = np.random.default_rng(seed)
        return [self.sample_state(rng) for _ in range(count)]


def embed_switched(osc: OscillatoryFlowSpec, eps: float, cfg: AutomatonConfig,
                   sched: SwitchSchedule,
                   x_flow_set=None) -> HybridSystemSpec:
    """Build [x | z1 | tau] base system and embed the budget automaton."""
    n1 = osc.n1
    rate1, rate2 = 1.0 / eps, 1.0 / eps**2

    def base_flow(state, t):
        x, z1 = state[:n1], state[n1]
        tau1, tau2 = state[n1 + 1], state[n1 + 2]
        vel = np.empty(n1 + 3)
        vel[:n1] = np.asarray(osc.phi1(x, z1, tau1, tau2)) / eps \
            + np.asarray(osc.phi2(x, z1, tau1, tau2))
        vel[n1] = 0.0
        vel[n1 + 1] = rate1
        vel[n1 + 2] = rate2
        return vel

    def base_flow_set(state, tol):
        if x_flow_set is not None and not x_flow_set(state[:n1], tol):
            return False
        return True

    base = HybridSystemSpec(
        n=n1 + 3,
        flow_set=base_flow_set,
        flow_field=base_flow,
        jump_set=lambda state, tol: False,
        jump_map=lambda state: [],
        oscillatory=OscillatoryBinding(flow=osc, eps=eps, n1=n1, nz=1,
                                       mode_index=n1),
    )
    return automaton_embed(cfg, sched, base)


def switched_initial_state(x0, mode0: int, cfg: AutomatonConfig) -> np.ndarray:
    """Initial [x | z1, z2, z3 | tau1, tau2] with full budgets and zero timers."""
    x0 = np.asarray(x0, dtype=float)
    return np.concatenate([x0, [float(mode0), float(cfg.N0), float(cfg.T0),
                                0.0, 0.0]])


def switched_columns(x_names: Sequence[str]) -> tuple[str, ...]:
    return tuple(x_names) + ("z1", "z2", "z3", "tau1", "tau2")


def quadratic_cost(weights, center):
    """J(x) = 0.5 * sum_i w_i (x_i - c_i)^2 with its gradient."""
    w = np.asarray(weights, dtype=float)
    c = np.asarray(center, dtype=float)

    def j(x):
        d = np.asarray(x, dtype=float) - c
        return 0.5 * float(np.sum(w * d * d))

    def grad(x):
        return w * (np.asarray(x, dtype=float) - c)

    return j, grad
