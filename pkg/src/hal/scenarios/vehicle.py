"""Source-seeking unicycle with intermittent and spoofed cost measurements.

Rotating-frame model: planar position drives along a unit heading vector that
spins at the mid timescale, modulated by a high-frequency cosine whose phase
carries the measured cost.  The logic mode selects how the measurement enters
the phase: nominal descent, measurement blackout, or adversarial spoofing.
The slow behavior is plain gradient descent scaled by (2 - mode)/2, so the
nominal mode stabilizes the minimizer while the spoofed mode repels it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..automaton import AutomatonConfig, SwitchSchedule, check_schedule
from ..closeness import IndicatorSpec
from ..errors import InfeasibleSchedule
from ..oscillatory import OscillatoryFlowSpec
from .base import (ScenarioSystem, embed_switched, mode_value, quadratic_cost,
                   switched_columns, switched_initial_state)

ROOT2 = float(np.sqrt(2.0))
TWO_PI = 2.0 * np.pi

DEFAULT_AUTOMATON = AutomatonConfig(
    modes=(1, 2, 3), stable=(3,), unstable=(1, 2),
    eta1=1.0, eta2=0.25, N0=2, T0=2.0,
)

# mostly-nominal switching: brief blackout and spoofing excursions
NOMINAL_SCHEDULE = SwitchSchedule(
    [(3.0, 2), (4.0, 3), (9.0, 1), (10.0, 3), (15.0, 2), (15.5, 3)], mode0=3)

# persistent spoofing attack; violates the default activation budget
AGGRESSIVE_SCHEDULE = SwitchSchedule(
    [(1.5, 3), (2.5, 1), (4.0, 3), (5.0, 1), (6.5, 3), (7.5, 1),
     (9.0, 3), (10.0, 1), (11.5, 3), (12.5, 1), (14.0, 3), (15.0, 1),
     (16.5, 3), (17.5, 1), (19.0, 3)], mode0=1)

# loosened budgets that admit the aggressive attack signal
AGGRESSIVE_AUTOMATON = AutomatonConfig(
    modes=(1, 2, 3), stable=(3,), unstable=(1, 2),
    eta1=1.0, eta2=0.8, N0=2, T0=2.0,
)


@dataclass
class VehicleParams:
    eps: float = 1.0 / np.sqrt(10.0 * np.pi)
    cost: Optional[Callable] = None            # J(x_p)
    cost_grad: Optional[Callable] = None       # grad J(x_p)
    schedule: SwitchSchedule = field(default_factory=lambda: NOMINAL_SCHEDULE)
    automaton: AutomatonConfig = field(default_factory=lambda: DEFAULT_AUTOMATON)
    x0: Sequence[float] = (-4.0, 4.0)
    heading0: float = 0.0                      # initial angle of the unit heading
    t_final: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.cost is None or self.cost_grad is None:
            self.cost, self.cost_grad = quadratic_cost((1.0, 1.0), (0.0, 0.0))


def heading_matrix(tau1: float) -> np.ndarray:
    c, s = np.cos(tau1), np.sin(tau1)
    return np.array([[c, s], [-s, c]])


def make_vehicle_flow(params: VehicleParams) -> OscillatoryFlowSpec:
    """Oscillatory flow on x = (position, heading) in R^2 x S^1.

    The dominant term is sqrt(2) * A(tau1) h * cos(tau2 + (mode - 2) J(pos))
    on the position block (the sqrt(2) amplitude normalizes the second-order
    average to (2 - mode)/2 * grad J); the heading block is constant.
    """
    J, gJ = params.cost, params.cost_grad

    def phi1(x, z, tau1, tau2):
        z1 = mode_value(z)
        c = (z1 - 2.0) * J(x[:2])
        h = np.array([np.cos(tau1) * x[2] + np.sin(tau1) * x[3],
                      -np.sin(tau1) * x[2] + np.cos(tau1) * x[3]])
        wave = ROOT2 * np.cos(np.asarray(tau2) + c)
        if np.ndim(tau2) == 0:
            out = np.zeros(4)
            out[:2] = h * wave
            return out
        out = np.zeros((len(np.atleast_1d(tau2)), 4))
        out[:, :2] = np.multiply.outer(np.atleast_1d(wave), h)
        return out

    def phi2(x, z, tau1, tau2):
        if np.ndim(tau2) == 0:
            return np.zeros(4)
        return np.zeros((len(np.atleast_1d(tau2)), 4))

    def jac_phi1(x, z, tau1, tau2):
        z1 = mode_value(z)
        c = (z1 - 2.0) * J(x[:2])
        g = gJ(x[:2])
        A = heading_matrix(tau1)
        h = A @ np.array([x[2], x[3]])
        t2 = np.atleast_1d(np.asarray(tau2, dtype=float))
        cos_w = ROOT2 * np.cos(t2 + c)
        sin_w = ROOT2 * np.sin(t2 + c)
        jac = np.zeros((len(t2), 4, 4))
        # position columns: phase sensitivity through the cost
        jac[:, :2, :2] = -np.multiply.outer(sin_w * (z1 - 2.0), np.outer(h, g))
        # heading columns: linear in the rotated frame
        jac[:, :2, 2:] = np.multiply.outer(cos_w, A)
        if np.ndim(tau2) == 0:
            return jac[0]
        return jac

    return OscillatoryFlowSpec(n1=4, phi1=phi1, phi2=phi2,
                               T1=TWO_PI, T2=TWO_PI, jac_phi1_x=jac_phi1)


def vehicle_affine_decomposition(params: VehicleParams):
    """phi1 = b1 * cos(tau2) + b2 * sin(tau2) with cost-bearing fields."""
    J = params.cost

    def b1(x, z, tau1):
        z1 = mode_value(z)
        c = (z1 - 2.0) * J(x[:2])
        h = heading_matrix(tau1) @ np.array([x[2], x[3]])
        out = np.zeros(4)
        out[:2] = ROOT2 * np.cos(c) * h
        return out

    def b2(x, z, tau1):
        z1 = mode_value(z)
        c = (z1 - 2.0) * J(x[:2])
        h = heading_matrix(tau1) @ np.array([x[2], x[3]])
        out = np.zeros(4)
        out[:2] = -ROOT2 * np.sin(c) * h
        return out

    return ([b1, b2], [lambda t1, t2: np.cos(t2), lambda t1, t2: np.sin(t2)])


def build_vehicle(params: Optional[VehicleParams] = None
                  ) -> tuple[ScenarioSystem, Callable]:
    """Assemble the switched vehicle scenario and its closed-form average.

    Returns the scenario plus ``analytic_average(x, mode)`` equal to
    (2 - mode)/2 * grad J on the position block and zero on the heading.
    """
    params = params or VehicleParams()
    horizon = max(params.t_final,
                  params.schedule.entries[-1][0] if params.schedule.entries else 0.0)
    verdict = check_schedule(params.schedule, params.schedule.mode0,
                             params.automaton, horizon)
    if not verdict.ok:
        raise InfeasibleSchedule(
            f"vehicle schedule rejected (adt margin {verdict.worst_adt_margin:.3g}, "
            f"att margin {verdict.worst_att_margin:.3g})")

    osc = make_vehicle_flow(params)
    system = embed_switched(osc, params.eps, params.automaton, params.schedule)
    gJ = params.cost_grad

    def analytic_average(x, z):
        z1 = mode_value(z)
        out = np.zeros(4)
        out[:2] = 0.5 * (2.0 - z1) * gJ(np.asarray(x, dtype=float)[:2])
        return out

    def sample_state(rng):
        x = np.empty(4)
        x[:2] = rng.uniform(-3.0, 3.0, size=2)
        ang = rng.uniform(0.0, TWO_PI)
        x[2], x[3] = np.cos(ang), np.sin(ang)
        mode = float(rng.integers(1, 4))
        return x, mode

    x0 = switched_initial_state(
        np.array([params.x0[0], params.x0[1],
                  np.cos(params.heading0), np.sin(params.heading0)]),
        params.schedule.mode0, params.automaton)

    scenario = ScenarioSystem(
        name="vehicle",
        osc=osc,
        eps=params.eps,
        system=system,
        analytic_average=analytic_average,
        indicator=IndicatorSpec(points=np.zeros((1, 2)), components=(0, 1)),
        x0=x0,
        columns=switched_columns(("x_1", "x_2", "x_3", "x_4")),
        automaton=params.automaton,
        schedule=params.schedule,
        t_final=params.t_final,
        seed=params.seed,
        projection=system.budget_projection,
        priority="schedule",
        affine_decomposition=vehicle_affine_decomposition(params),
        sample_state=sample_state,
    )
    return scenario, analytic_average


def aggressive_vehicle_params() -> VehicleParams:
    """Spoofing-dominant attack run from the second start point."""
    return VehicleParams(schedule=AGGRESSIVE_SCHEDULE,
                        automaton=AGGRESSIVE_AUTOMATON,
                        x0=(-4.0, -4.0))
