"""Control-affine model-free optimization under measurement faults.

The state moves along a family of vector fields, each modulated by a
high-frequency cosine at its own rational frequency whose phase carries the
measured cost.  As in the vehicle case, the logic mode switches the phase
between descent, blackout, and spoofing.  The slow behavior is
(2 - mode) * P(x) * grad J(x) with P the mid-timescale average of the summed
outer products of the fields, so stability needs P to stay uniformly
positive definite along trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from ..automaton import AutomatonConfig, SwitchSchedule, check_schedule
from ..closeness import IndicatorSpec
from ..errors import (ExcitationDeficient, FrequencyCollision,
                      InfeasibleSchedule)
from ..oscillatory import OscillatoryFlowSpec, common_period, trapezoid_period
from .base import (ScenarioSystem, embed_switched, mode_value, quadratic_cost,
                   switched_columns, switched_initial_state)
from .vehicle import DEFAULT_AUTOMATON, NOMINAL_SCHEDULE

TWO_PI = 2.0 * np.pi


def basis_fields(n: int):
    """Constant coordinate fields e_1, ..., e_n."""
    eye = np.eye(n)

    def make(i):
        def b(x, tau1):
            return eye[i]
        return b
    return [make(i) for i in range(n)]


@dataclass
class EsAffineParams:
    n: int = 2
    fields: Optional[Sequence[Callable]] = None    # b_i(x, tau1)
    frequencies: Optional[Sequence] = None          # positive rationals
    cost: Optional[Callable] = None
    cost_grad: Optional[Callable] = None
    eps: float = 0.1
    schedule: SwitchSchedule = field(default_factory=lambda: NOMINAL_SCHEDULE)
    automaton: AutomatonConfig = field(default_factory=lambda: DEFAULT_AUTOMATON)
    x0: Optional[Sequence[float]] = None
    t_final: float = 20.0
    seed: int = 0
    T1: float = TWO_PI
    lambda_probe: float = 1e-6   # smallest admissible eigenvalue of P on probes
    constant_fields: bool = True

    def __post_init__(self):
        if self.fields is None:
            self.fields = basis_fields(self.n)
            self.constant_fields = True
        if self.frequencies is None:
            self.frequencies = [Fraction(i + 1) for i in range(len(self.fields))]
        self.frequencies = [Fraction(w) if not isinstance(w, (tuple, list))
                            else Fraction(int(w[0]), int(w[1]))
                            for w in self.frequencies]
        if len(set(self.frequencies)) != len(self.frequencies):
            raise FrequencyCollision("probing frequencies must be pairwise distinct")
        if len(self.frequencies) != len(self.fields):
            raise ValueError("need one frequency per vector field")
        if self.cost is None or self.cost_grad is None:
            self.cost, self.cost_grad = quadratic_cost(np.ones(self.n),
                                                       np.zeros(self.n))
        if self.x0 is None:
            self.x0 = np.full(self.n, 1.5)


def excitation_matrix(params: EsAffineParams, x, nodes: int = 128) -> np.ndarray:
    """P(x): mid-timescale average of sum_i b_i(x, tau1) outer b_i(x, tau1)."""
    x = np.asarray(x, dtype=float)
    if params.constant_fields:
        acc = np.zeros((params.n, params.n))
        for b in params.fields:
            v = np.asarray(b(x, 0.0), dtype=float)
            acc += np.outer(v, v)
        return acc
    grid = np.linspace(0.0, params.T1, nodes + 1)
    samples = np.zeros((nodes + 1, params.n, params.n))
    for k, t1 in enumerate(grid):
        for b in params.fields:
            v = np.asarray(b(x, t1), dtype=float)
            samples[k] += np.outer(v, v)
    return trapezoid_period(samples, params.T1) / params.T1


def probe_excitation(params: EsAffineParams, count: int = 20, seed: int = 0,
                     radius: float = 3.0) -> float:
    """Smallest eigenvalue of the symmetrized P(x) over seeded probe points."""
    rng = np.random.default_rng(seed)
    lam = np.inf
    for _ in range(count):
        x = rng.uniform(-radius, radius, size=params.n)
        P = excitation_matrix(params, x)
        lam = min(lam, float(np.min(np.linalg.eigvalsh(0.5 * (P + P.T)))))
    return lam


def make_es_flow(params: EsAffineParams) -> OscillatoryFlowSpec:
    n = params.n
    r = len(params.fields)
    w = np.array([float(f) for f in params.frequencies])
    amp = np.sqrt(2.0 * w)
    T2 = common_period(params.frequencies)
    J, gJ = params.cost, params.cost_grad
    fields = params.fields

    def phi1(x, z, tau1, tau2):
        x = np.asarray(x, dtype=float)
        z1 = mode_value(z)
        c = (z1 - 2.0) * J(x)
        t2 = np.asarray(tau2, dtype=float)
        waves = amp * np.cos(np.multiply.outer(t2, w) + c)    # (..., r)
        bmat = np.stack([np.asarray(b(x, tau1), dtype=float) for b in fields])
        if t2.ndim == 0:
            return waves @ bmat
        return waves @ bmat

    def phi2(x, z, tau1, tau2):
        if np.ndim(tau2) == 0:
            return np.zeros(n)
        return np.zeros((len(np.atleast_1d(tau2)), n))

    jac = None
    if params.constant_fields:
        def jac(x, z, tau1, tau2):
            x = np.asarray(x, dtype=float)
            z1 = mode_value(z)
            c = (z1 - 2.0) * J(x)
            g = (z1 - 2.0) * gJ(x)
            t2 = np.atleast_1d(np.asarray(tau2, dtype=float))
            sines = amp * np.sin(np.multiply.outer(t2, w) + c)  # (m, r)
            bmat = np.stack([np.asarray(b(x, tau1), dtype=float) for b in fields])
            out = -np.einsum("mr,ri,j->mij", sines, bmat, g)
            if np.ndim(tau2) == 0:
                return out[0]
            return out

    return OscillatoryFlowSpec(n1=n, phi1=phi1, phi2=phi2, T1=params.T1, T2=T2,
                               jac_phi1_x=jac)


def es_affine_decomposition(params: EsAffineParams):
    """phi1 = sum_i [b_i cos(c)] sqrt(2 w_i) cos(w_i tau2)
                 + [-b_i sin(c)] sqrt(2 w_i) sin(w_i tau2)."""
    J = params.cost
    w = [float(f) for f in params.frequencies]
    bs, vs = [], []
    for i, b in enumerate(params.fields):
        amp = float(np.sqrt(2.0 * w[i]))

        def b_cos(x, z, tau1, b=b):
            c = (mode_value(z) - 2.0) * J(np.asarray(x, dtype=float))
            return np.cos(c) * np.asarray(b(x, tau1), dtype=float)

        def b_sin(x, z, tau1, b=b):
            c = (mode_value(z) - 2.0) * J(np.asarray(x, dtype=float))
            return -np.sin(c) * np.asarray(b(x, tau1), dtype=float)

        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.cos(wi * t2))
        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.sin(wi * t2))
        bs.extend([b_cos, b_sin])
    return bs, vs


def build_es_affine(params: Optional[EsAffineParams] = None
                    ) -> tuple[ScenarioSystem, Callable]:
    """Assemble the control-affine seeking scenario and its slow model.

    ``analytic_average(x, mode)`` is (2 - mode) * P(x) * grad J(x); for the
    default orthonormal constant fields P is the identity.
    """
    params = params or EsAffineParams()
    lam = probe_excitation(params)
    if lam < params.lambda_probe:
        raise ExcitationDeficient(
            f"excitation matrix not uniformly positive on probes (min eig {lam:.3g})")
    horizon = max(params.t_final,
                  params.schedule.entries[-1][0] if params.schedule.entries else 0.0)
    verdict = check_schedule(params.schedule, params.schedule.mode0,
                             params.automaton, horizon)
    if not verdict.ok:
        raise InfeasibleSchedule("seeking schedule rejected")

    osc = make_es_flow(params)
    system = embed_switched(osc, params.eps, params.automaton, params.schedule)
    gJ = params.cost_grad

    def analytic_average(x, z):
        x = np.asarray(x, dtype=float)
        z1 = mode_value(z)
        return (2.0 - z1) * (excitation_matrix(params, x) @ gJ(x))

    def sample_state(rng):
        x = rng.uniform(-2.0, 2.0, size=params.n)
        mode = float(rng.integers(1, 4))
        return x, mode

    x0 = switched_initial_state(np.asarray(params.x0, dtype=float),
                                params.schedule.mode0, params.automaton)
    target = np.zeros(params.n)  # quadratic default center
    from ..averaging import QuadratureConfig
    scenario = ScenarioSystem(
        name="es-affine",
        osc=osc,
        eps=params.eps,
        system=system,
        analytic_average=analytic_average,
        indicator=IndicatorSpec(points=target[None, :],
                                components=tuple(range(params.n))),
        x0=x0,
        columns=switched_columns(tuple(f"x_{i+1}" for i in range(params.n))),
        automaton=params.automaton,
        schedule=params.schedule,
        t_final=params.t_final,
        seed=params.seed,
        projection=system.budget_projection,
        priority="schedule",
        # multi-frequency probing spreads harmonics over a longer common
        # period, so the fast-timer grid is denser here
        quad=QuadratureConfig(nodes_tau1=256, nodes_tau2=512),
        affine_decomposition=es_affine_decomposition(params),
        sample_state=sample_state,
    )
    return scenario, analytic_average
