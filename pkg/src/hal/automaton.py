"""Dwell-time / activation-time switching automaton and schedule checks.

The automaton carries a logic mode z1 in a finite set Q (partitioned into
stable and unstable modes), a jump-budget timer z2 in [0, N0] that refills at
rate up to eta1 and pays one unit per switch, and an activation-budget timer
z3 in [0, T0] that refills at rate up to eta2 and drains at unit rate while
an unstable mode is active.  Any signal it can generate obeys, on every
window [t1, t2],

    jumps(t1, t2)           <= eta1 * (t2 - t1) + N0
    unstable_time(t1, t2)   <= eta2 * (t2 - t1) + T0.

Schedules are explicit switch-time lists; :func:`check_schedule` verifies the
two window inequalities and :func:`automaton_embed` builds the product of a
base hybrid system with the automaton, driven by the schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExhausted, HalError, ScheduleRejected
from .systems import (HybridSystemSpec, OscillatoryBinding, ScheduledJump,
                      hint_selector)


@dataclass
class AutomatonConfig:
    modes: tuple[int, ...]
    stable: tuple[int, ...]
    unstable: tuple[int, ...]
    eta1: float
    eta2: float
    N0: int
    T0: float

    def __post_init__(self):
        self.modes = tuple(int(q) for q in self.modes)
        self.stable = tuple(int(q) for q in self.stable)
        self.unstable = tuple(int(q) for q in self.unstable)
        if set(self.stable) | set(self.unstable) != set(self.modes):
            raise HalError("stable and unstable modes must partition the mode set")
        if set(self.stable) & set(self.unstable):
            raise HalError("stable and unstable mode sets overlap")
        if self.eta1 < 0 or self.eta2 < 0:
            raise HalError("budget rates must be nonnegative")
        if self.N0 < 1:
            raise HalError("jump budget N0 must be at least 1")
        if self.T0 < 0:
            raise HalError("activation budget T0 must be nonnegative")

    def is_unstable(self, mode) -> bool:
        return int(round(mode)) in self.unstable


@dataclass
class AutomatonState:
    z1: int
    z2: float
    z3: float


@dataclass
class SwitchSchedule:
    """Ordered (time, target mode) switch list plus the initial mode."""

    entries: list[tuple[float, int]]
    mode0: Optional[int] = None

    def __post_init__(self):
        self.entries = [(float(t), int(m)) for t, m in self.entries]
        times = [t for t, _ in self.entries]
        if any(t <= 0 for t in times):
            raise HalError("switch times must be strictly positive")
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise HalError("switch times must be strictly increasing")
        prev = self.mode0
        for _, m in self.entries:
            if prev is not None and m == prev:
                raise HalError("switch target must differ from the previous mode")
            prev = m

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.entries]

    def mode_at(self, t: float) -> int:
        """Active mode at time t (right-continuous across switches)."""
        if self.mode0 is None:
            raise HalError("schedule has no initial mode")
        mode = self.mode0
        for s, m in self.entries:
            if t >= s:
                mode = m
            else:
                break
        return mode

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            f.write("time,mode\n")
            for t, m in self.entries:
                f.write(f"{t!r},{m}\n")

    @classmethod
    def from_csv(cls, path, mode0: Optional[int] = None) -> "SwitchSchedule":
        entries = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                try:
                    entries.append((float(parts[0]), int(float(parts[1]))))
                except ValueError:
                    continue  # header row
        return cls(entries, mode0=mode0)


@dataclass
class ScheduleVerdict:
    adt_ok: bool
    att_ok: bool
    worst_adt_margin: float
    worst_att_margin: float

    @property
    def ok(self) -> bool:
        return self.adt_ok and self.att_ok


def timer_rates(state: AutomatonState, cfg: AutomatonConfig) -> tuple[float, float]:
    """Budget-timer flow selection: maximal refill, clipped to the boxes.

    z2 refills at eta1 until it saturates at N0.  z3 changes at
    eta2 - 1{unstable}(z1), clipped so it stays in [0, T0]; if the budget is
    exhausted while an unstable mode drains faster than the refill, no
    admissible flow exists and :class:`BudgetExhausted` is raised.
    """
    dz2 = cfg.eta1 if state.z2 < cfg.N0 else 0.0
    rate3 = cfg.eta2 - (1.0 if cfg.is_unstable(state.z1) else 0.0)
    if rate3 > 0 and state.z3 >= cfg.T0:
        rate3 = 0.0
    elif rate3 < 0 and state.z3 <= 0.0:
        raise BudgetExhausted(
            f"activation budget empty while unstable mode {state.z1} is active")
    return dz2, rate3


def check_schedule(sched: SwitchSchedule, mode0: int, cfg: AutomatonConfig,
                   horizon: float) -> ScheduleVerdict:
    """Evaluate the two window inequalities over all event-time windows.

    Window endpoints are restricted to {0, switch times, horizon}; the jump
    count and the unstable activation time are piecewise constant / linear
    between events, so these windows attain the worst margins.
    """
    if sched.entries and horizon < sched.entries[-1][0]:
        raise HalError("horizon must cover the last scheduled switch")
    times = [0.0] + sched.times + [horizon]
    switch_times = np.asarray(sched.times)

    # unstable activation time, cumulative at the event times
    modes = [mode0] + [m for _, m in sched.entries]
    cum = [0.0]
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        active = 1.0 if cfg.is_unstable(modes[k]) else 0.0
        cum.append(cum[-1] + active * dt)

    worst_adt = np.inf
    worst_att = np.inf
    for a in range(len(times)):
        for b in range(a, len(times)):
            t1, t2 = times[a], times[b]
            span = t2 - t1
            n_jumps = int(np.count_nonzero((switch_times >= t1) & (switch_times <= t2)))
            worst_adt = min(worst_adt, cfg.eta1 * span + cfg.N0 - n_jumps)
            worst_att = min(worst_att, cfg.eta2 * span + cfg.T0 - (cum[b] - cum[a]))
    return ScheduleVerdict(
        adt_ok=bool(worst_adt >= 0.0),
        att_ok=bool(worst_att >= 0.0),
        worst_adt_margin=float(worst_adt),
        worst_att_margin=float(worst_att),
    )


def schedule_from_arc(arc, mode_index: int) -> SwitchSchedule:
    """Recover the executed switch schedule from an arc's mode component."""
    entries = []
    mode0 = None
    prev_mode = None
    for seg in arc.segments:
        mode = int(round(seg.states[0, mode_index]))
        if mode0 is None:
            mode0 = mode
        elif mode != prev_mode:
            entries.append((float(seg.times[0]), mode))
        prev_mode = mode
    return SwitchSchedule(entries, mode0=mode0)


def automaton_embed(cfg: AutomatonConfig, sched: SwitchSchedule,
                    base: HybridSystemSpec) -> HybridSystemSpec:
    """Product of a mode-carrying base system with the budget automaton.

    The base state must be laid out [x | z1 | tau1, tau2] (an oscillatory
    binding with nz = 1 whose z block is the logic mode).  The embedded
    system inserts the two budget timers after z1, flows them with
    :func:`timer_rates`, and jumps at the scheduled times: the x block and
    the fast timers are unchanged, z1 moves to the scheduled target, and the
    jump budget decrements.  The schedule is validated first and rejected
    when a window inequality fails.
    """
    binding = base.oscillatory
    if binding is None or binding.nz != 1 or binding.mode_index is None:
        raise HalError("base system must carry a [x | z1 | tau] oscillatory binding")
    if sched.mode0 is None:
        raise HalError("schedule must declare its initial mode")
    horizon = (sched.entries[-1][0] if sched.entries else 0.0)
    verdict = check_schedule(sched, sched.mode0, cfg, horizon=max(horizon, 1.0))
    if not verdict.ok:
        raise ScheduleRejected(
            f"schedule violates budgets (adt margin {verdict.worst_adt_margin:.3g}, "
            f"att margin {verdict.worst_att_margin:.3g})")

    n1 = binding.n1
    iz1, iz2, iz3 = n1, n1 + 1, n1 + 2
    n = n1 + 3 + 2

    def split(state):
        return state[:n1], state[iz1], state[iz2], state[iz3], state[n1 + 3:]

    def flow_field(state, t):
        x, z1, z2, z3, tau = split(state)
        base_state = np.concatenate([x, [z1], tau])
        base_vel = base.flow_field(base_state, t)
        dz2, dz3 = timer_rates(AutomatonState(int(round(z1)), z2, z3), cfg)
        vel = np.empty(n)
        vel[:n1] = base_vel[:n1]
        vel[iz1] = 0.0
        vel[iz2] = dz2
        vel[iz3] = dz3
        vel[n1 + 3:] = base_vel[n1 + 1:]
        return vel

    def flow_set(state, tol):
        x, z1, z2, z3, tau = split(state)
        base_state = np.concatenate([x, [z1], tau])
        in_box = (-tol <= z2 <= cfg.N0 + tol) and (-tol <= z3 <= cfg.T0 + tol)
        return in_box and int(round(z1)) in cfg.modes and base.flow_set(base_state, tol)

    def jump_set(state, tol):
        x, z1, z2, z3, tau = split(state)
        base_state = np.concatenate([x, [z1], tau])
        in_box = (1.0 - tol <= z2 <= cfg.N0 + tol) and (-tol <= z3 <= cfg.T0 + tol)
        return in_box and int(round(z1)) in cfg.modes and base.flow_set(base_state, tol)

    def jump_map(state):
        x, z1, z2, z3, tau = split(state)
        current = int(round(z1))
        succ = []
        for target in cfg.modes:
            if target == current:
                continue
            s = state.copy()
            s[iz1] = float(target)
            s[iz2] = z2 - 1.0
            succ.append(s)
        return succ

    def projection(state):
        out = state.copy()
        out[iz2] = min(max(out[iz2], 0.0), float(cfg.N0))
        out[iz3] = min(max(out[iz3], 0.0), float(cfg.T0))
        return out

    def selector(successors, state, hint, rng):
        return hint_selector(successors, state, hint, rng, index=iz1)

    embedded = HybridSystemSpec(
        n=n,
        flow_set=flow_set,
        flow_field=flow_field,
        jump_set=jump_set,
        jump_map=jump_map,
        jump_selector=selector,
        event_schedule=[ScheduledJump(t, m) for t, m in sched.entries],
        oscillatory=OscillatoryBinding(
            flow=binding.flow, eps=binding.eps, n1=n1, nz=3, mode_index=iz1,
            z_rates=_budget_rates(cfg, n1),
        ),
    )
    embedded.automaton = cfg
    embedded.schedule = sched
    embedded.budget_projection = projection
    return embedded


def _budget_rates(cfg: AutomatonConfig, n1: int):
    def z_rates(state):
        z1, z2, z3 = state[n1], state[n1 + 1], state[n1 + 2]
        dz2, dz3 = timer_rates(AutomatonState(int(round(z1)), z2, z3), cfg)
        return np.array([0.0, dz2, dz3])
    return z_rates
