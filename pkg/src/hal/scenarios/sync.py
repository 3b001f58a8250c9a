"""Decentralized oscillator synchronization with switching topologies.

Each unit circles at unit angular speed plus a high-frequency probing input
whose phase carries the locally measured disagreement with its neighbors.
The logic mode selects both the active communication graph and the (unknown)
sign of each unit's control channel.  The slow behavior is the classic
sinusoidal-coupling consensus flow over the active graph, independent of the
control signs, so connected topologies practically synchronize the phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from ..automaton import AutomatonConfig, SwitchSchedule, check_schedule
from ..closeness import IndicatorSpec
from ..errors import DisconnectedGraph, FrequencyCollision, InfeasibleSchedule
from ..oscillatory import OscillatoryFlowSpec, common_period
from .base import (ScenarioSystem, embed_switched, mode_value,
                   switched_columns, switched_initial_state)

TWO_PI = 2.0 * np.pi

# Example topologies on four nodes: a path, a hub, and a ring.
FOUR_NODE_GRAPHS = (
    ((0, 1), (1, 2), (2, 3)),
    ((0, 1), (0, 2), (0, 3)),
    ((0, 1), (1, 2), (2, 3), (3, 0)),
)

# direction patterns of the two reference cases
R2_DIRECTIONS = ((1, 1), (-1, 1), (1, -1), (-1, -1))
R4_DIRECTIONS = ((1, 1, -1, 1), (-1, 1, 1, 1), (-1, 1, -1, -1), (-1, -1, 1, 1))


def _check_connected(r: int, edges) -> None:
    adj = {i: set() for i in range(r)}
    for (a, b) in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != r:
        raise DisconnectedGraph(f"graph {tuple(edges)} is not connected on {r} nodes")


def neighbor_lists(r: int, edges):
    nbrs = [[] for _ in range(r)]
    for (a, b) in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    return [tuple(sorted(n)) for n in nbrs]


@dataclass
class SyncParams:
    r: int = 2
    graphs: Sequence = (((0, 1),),)
    directions: Sequence = R2_DIRECTIONS
    bijection: Optional[Sequence[tuple[int, int]]] = None  # mode-1 -> (graph, dir)
    frequencies: Optional[Sequence] = None                 # rationals, default 1..r
    eps: float = 1.0 / np.sqrt(60.0 * np.pi)
    schedule: Optional[SwitchSchedule] = None
    automaton: Optional[AutomatonConfig] = None
    xi0: Optional[Sequence[float]] = None
    t_final: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.frequencies is None:
            self.frequencies = [Fraction(i + 1) for i in range(self.r)]
        self.frequencies = [Fraction(w) if not isinstance(w, (tuple, list))
                            else Fraction(int(w[0]), int(w[1]))
                            for w in self.frequencies]
        if len(set(self.frequencies)) != len(self.frequencies):
            raise FrequencyCollision("probing frequencies must be distinct")
        if len(self.frequencies) != self.r:
            raise ValueError("need one frequency per oscillator")
        for g in self.graphs:
            _check_connected(self.r, g)
        n_modes = len(self.graphs) * len(self.directions)
        if self.bijection is None:
            self.bijection = [(gi, di) for gi in range(len(self.graphs))
                              for di in range(len(self.directions))]
        if sorted(self.bijection) != sorted(
                (gi, di) for gi in range(len(self.graphs))
                for di in range(len(self.directions))):
            raise ValueError("bijection must enumerate every (graph, direction) pair")
        if self.automaton is None:
            self.automaton = AutomatonConfig(
                modes=tuple(range(1, n_modes + 1)), stable=tuple(range(1, n_modes + 1)),
                unstable=(), eta1=1.0, eta2=1.0, N0=2, T0=1.0)
        if self.schedule is None:
            targets = [(i % n_modes) + 1 for i in range(1, 8)]
            entries = []
            prev = 1
            t = 2.5
            for m in targets:
                if m != prev:
                    entries.append((t, m))
                    prev = m
                    t += 2.5
            self.schedule = SwitchSchedule(entries, mode0=1)
        if self.xi0 is None:
            rng = np.random.default_rng(self.seed)
            self.xi0 = rng.uniform(0.0, 1.2, size=self.r)


def pairwise_sync_error(xi) -> float:
    """Largest pairwise circle distance between the phase angles."""
    xi = np.asarray(xi, dtype=float)
    err = 0.0
    for i in range(len(xi)):
        for j in range(i + 1, len(xi)):
            d = abs((xi[i] - xi[j] + np.pi) % TWO_PI - np.pi)
            err = max(err, d)
    return err


def to_circle_embedding(xi) -> np.ndarray:
    """Planar unit-circle coordinates (-cos, sin) of each phase angle."""
    xi = np.asarray(xi, dtype=float)
    return np.stack([-np.cos(xi), np.sin(xi)], axis=-1)


def make_sync_flow(params: SyncParams) -> OscillatoryFlowSpec:
    r = params.r
    w = np.array([float(f) for f in params.frequencies])
    amp = np.sqrt(2.0 * w)
    T2 = common_period(params.frequencies)
    nbrs_by_graph = [neighbor_lists(r, g) for g in params.graphs]
    dirs = np.asarray(params.directions, dtype=float)
    bij = list(params.bijection)

    def local_costs(xi, gi):
        nbrs = nbrs_by_graph[gi]
        return np.array([np.sum(1.0 - np.cos(xi[i] - xi[list(nbrs[i])]))
                         if nbrs[i] else 0.0 for i in range(r)])

    def phi1(xi, z, tau1, tau2):
        gi, di = bij[int(round(mode_value(z))) - 1]
        alpha = dirs[di]
        costs = local_costs(np.asarray(xi, dtype=float), gi)
        t2 = np.asarray(tau2, dtype=float)
        if t2.ndim == 0:
            return alpha * amp * np.cos(w * t2 + costs)
        return alpha * amp * np.cos(np.multiply.outer(t2, w) + costs)

    def phi2(xi, z, tau1, tau2):
        if np.ndim(tau2) == 0:
            return np.ones(r)
        return np.ones((len(np.atleast_1d(tau2)), r))

    def jac_phi1(xi, z, tau1, tau2):
        xi = np.asarray(xi, dtype=float)
        gi, di = bij[int(round(mode_value(z))) - 1]
        alpha = dirs[di]
        nbrs = nbrs_by_graph[gi]
        costs = local_costs(xi, gi)
        grad = np.zeros((r, r))
        for i in range(r):
            for m in nbrs[i]:
                s = np.sin(xi[i] - xi[m])
                grad[i, i] += s
                grad[i, m] = -s
        t2 = np.atleast_1d(np.asarray(tau2, dtype=float))
        sines = np.sin(np.multiply.outer(t2, w) + costs)    # (m, r)
        jac = -(alpha * amp * sines)[:, :, None] * grad[None, :, :]
        if np.ndim(tau2) == 0:
            return jac[0]
        return jac

    return OscillatoryFlowSpec(n1=r, phi1=phi1, phi2=phi2, T1=TWO_PI, T2=T2,
                               jac_phi1_x=jac_phi1)


def sync_affine_decomposition(params: SyncParams):
    """phi1 - drift splits into per-unit cos/sin fields carrying the local
    disagreement, paired with pure waveforms at each unit's frequency."""
    r = params.r
    w = [float(f) for f in params.frequencies]
    nbrs_by_graph = [neighbor_lists(r, g) for g in params.graphs]
    dirs = np.asarray(params.directions, dtype=float)
    bij = list(params.bijection)

    def cost_i(xi, gi, i):
        nbrs = nbrs_by_graph[gi][i]
        if not nbrs:
            return 0.0
        return float(np.sum(1.0 - np.cos(xi[i] - np.asarray(xi)[list(nbrs)])))

    bs, vs = [], []
    eye = np.eye(r)
    for i in range(r):
        amp = float(np.sqrt(2.0 * w[i]))

        def b_cos(x, z, tau1, i=i):
            gi, di = bij[int(round(mode_value(z))) - 1]
            return dirs[di][i] * np.cos(cost_i(x, gi, i)) * eye[i]

        def b_sin(x, z, tau1, i=i):
            gi, di = bij[int(round(mode_value(z))) - 1]
            return -dirs[di][i] * np.sin(cost_i(x, gi, i)) * eye[i]

        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.cos(wi * t2))
        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.sin(wi * t2))
        bs.extend([b_cos, b_sin])
    return bs, vs


def build_sync(params: Optional[SyncParams] = None
               ) -> tuple[ScenarioSystem, Callable]:
    """Assemble the switched synchronization scenario and its slow model.

    ``analytic_average(xi, mode)`` is the unit drift minus the sinusoidal
    coupling over the mode's graph (direction signs cancel).
    """
    params = params or SyncParams()
    horizon = max(params.t_final,
                  params.schedule.entries[-1][0] if params.schedule.entries else 0.0)
    verdict = check_schedule(params.schedule, params.schedule.mode0,
                             params.automaton, horizon)
    if not verdict.ok:
        raise InfeasibleSchedule("synchronization schedule rejected")

    osc = make_sync_flow(params)
    system = embed_switched(osc, params.eps, params.automaton, params.schedule)
    nbrs_by_graph = [neighbor_lists(params.r, g) for g in params.graphs]
    bij = list(params.bijection)

    def analytic_average(xi, z):
        xi = np.asarray(xi, dtype=float)
        gi, _ = bij[int(round(mode_value(z))) - 1]
        nbrs = nbrs_by_graph[gi]
        out = np.ones(params.r)
        for i in range(params.r):
            if nbrs[i]:
                out[i] -= float(np.sum(np.sin(xi[i] - xi[list(nbrs[i])])))
        return out

    n_modes = len(params.graphs) * len(params.directions)

    def sample_state(rng):
        xi = rng.uniform(0.0, TWO_PI, size=params.r)
        mode = float(rng.integers(1, n_modes + 1))
        return xi, mode

    x0 = switched_initial_state(np.asarray(params.xi0, dtype=float),
                                params.schedule.mode0, params.automaton)

    scenario = ScenarioSystem(
        name="sync",
        osc=osc,
        eps=params.eps,
        system=system,
        analytic_average=analytic_average,
        indicator=IndicatorSpec(
            distance=lambda xi: pairwise_sync_error(xi),
            components=tuple(range(params.r))),
        x0=x0,
        columns=switched_columns(tuple(f"x_{i+1}" for i in range(params.r))),
        automaton=params.automaton,
        schedule=params.schedule,
        t_final=params.t_final,
        seed=params.seed,
        projection=system.budget_projection,
        priority="schedule",
        affine_decomposition=sync_affine_decomposition(params),
        sample_state=sample_state,
    )
    return scenario, analytic_average


def r2_params(**kw) -> SyncParams:
    """Two units, one complete graph, four direction patterns."""
    return SyncParams(r=2, graphs=(((0, 1),),), directions=R2_DIRECTIONS, **kw)


def r4_params(**kw) -> SyncParams:
    """Four units, three switching topologies, four direction patterns."""
    kw.setdefault("schedule", SwitchSchedule(
        [(2.0, 5), (4.0, 9), (6.0, 2), (8.0, 6), (10.0, 10), (12.0, 3),
         (14.0, 7), (16.0, 11), (18.0, 4)], mode0=1))
    return SyncParams(r=4, graphs=FOUR_NODE_GRAPHS, directions=R4_DIRECTIONS, **kw)
