"""Executable hybrid system descriptions and solver configuration.

A :class:`HybridSystemSpec` holds concrete selections of the set-valued data:
the flow field is a single callable, the jump map returns a finite list of
successors, and a selector policy picks one of them.  Set membership is
evaluated through predicates ``pred(state, tol)`` so boundary roundoff can be
absorbed by a configurable slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import HalError
from .oscillatory import OscillatoryFlowSpec

Predicate = Callable[[np.ndarray, float], bool]
FlowField = Callable[[np.ndarray, float], np.ndarray]
JumpMap = Callable[[np.ndarray], Sequence[np.ndarray]]
# selector(successors, state, hint, rng) -> chosen successor
Selector = Callable[[Sequence[np.ndarray], np.ndarray, Any, np.random.Generator], np.ndarray]

PRIORITIES = ("flow", "jump", "schedule")
_PRIORITY_ALIASES = {
    "flow-priority": "flow",
    "jump-priority": "jump",
    "schedule-driven": "schedule",
}


def first_selector(successors, state, hint, rng):
    """Deterministic policy: first successor in jump-map order."""
    return successors[0]


def random_selector(successors, state, hint, rng):
    """Seeded-random policy: uniform over the successor list."""
    return successors[rng.integers(len(successors))]


def hint_selector(successors, state, hint, rng, *, index: int):
    """Pick the successor whose ``index`` component equals the schedule hint."""
    if hint is None:
        return successors[0]
    for s in successors:
        if abs(s[index] - float(hint)) < 1e-9:
            return s
    raise HalError(f"no jump successor matches scheduled target {hint}")


@dataclass(frozen=True)
class ScheduledJump:
    time: float
    hint: Any = None


@dataclass
class OscillatoryBinding:
    """State-layout glue between a hybrid system and its oscillatory flow.

    Convention: the state vector is ordered ``[x-block | z-block | tau1, tau2]``.
    ``z_rates`` gives the flow of the z-block as a function of the full state
    (zero when omitted).  ``mode_index`` locates the logic mode inside the
    state, used when jumps are steered by a schedule of target modes.
    """

    flow: OscillatoryFlowSpec
    eps: float
    n1: int
    nz: int = 0
    mode_index: Optional[int] = None
    z_rates: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def n(self) -> int:
        return self.n1 + self.nz + 2

    def split(self, state: np.ndarray):
        x = state[: self.n1]
        z = state[self.n1 : self.n1 + self.nz]
        tau1, tau2 = state[self.n1 + self.nz], state[self.n1 + self.nz + 1]
        return x, z, tau1, tau2

    def mode_of(self, state: np.ndarray) -> float:
        if self.mode_index is None:
            return 0.0
        return float(state[self.mode_index])


@dataclass
class HybridSystemSpec:
    """Concrete hybrid system data (flow set/field, jump set/map, selector)."""

    n: int
    flow_set: Predicate
    flow_field: FlowField
    jump_set: Predicate
    jump_map: JumpMap
    jump_selector: Selector = first_selector
    event_schedule: Optional[list[ScheduledJump]] = None
    oscillatory: Optional[OscillatoryBinding] = None

    def __post_init__(self):
        if self.n <= 0:
            raise HalError("state dimension must be positive")
        if self.event_schedule:
            self.event_schedule = sorted(self.event_schedule, key=lambda e: e.time)

    def successors(self, state: np.ndarray) -> list[np.ndarray]:
        succ = [np.asarray(s, dtype=float) for s in self.jump_map(state)]
        if not succ:
            raise HalError("jump map returned no successors inside the jump set")
        return succ


@dataclass
class SolverConfig:
    """Fixed-step integration parameters.

    ``priority`` chooses how jumps are triggered where flowing and jumping
    are both allowed: ``flow`` (jump only when flowing is impossible),
    ``jump`` (jump as soon as the jump set is reached), or ``schedule``
    (jump only at scheduled event times).  ``projection`` is an optional
    per-step retraction applied to the state.  ``record_every`` thins the
    recorded samples (jump boundaries and segment endpoints always kept).
    """

    step: float
    t_final: float
    j_max: int = 1000
    priority: str = "jump"
    state_bound: float = 1e6
    projection: Optional[Callable[[np.ndarray], np.ndarray]] = None
    membership_tol: float = 1e-9
    seed: Optional[int] = None
    record_every: int = 1

    def __post_init__(self):
        self.priority = _PRIORITY_ALIASES.get(self.priority, self.priority)
        if self.priority not in PRIORITIES:
            raise HalError(f"priority must be one of {PRIORITIES}, got {self.priority!r}")
        if self.step <= 0:
            raise HalError("step must be positive")
        if self.t_final <= 0:
            raise HalError("t_final must be positive")
        if self.j_max < 0:
            raise HalError("j_max must be nonnegative")
        if self.state_bound <= 0:
            raise HalError("state_bound must be positive")
        if self.record_every < 1:
            raise HalError("record_every must be at least 1")


def oscillatory_step(eps: float, T2: float, divisor: int = 64) -> float:
    """Default integration step resolving the fast timer: eps**2 * T2 / divisor."""
    return eps * eps * T2 / divisor
