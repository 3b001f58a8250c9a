"""Fixed-step integration of hybrid systems and solution-condition checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arcs import ArcSegment, HybridArc
from .errors import (DimensionMismatch, EscapeDetected, HalError,
                     ScheduleInfeasible, StuckState)
from .systems import HybridSystemSpec, SolverConfig

_REL_TIME_EPS = 1e-12


def _rk4_step(field, x, t, h):
    k1 = field(x, t)
    k2 = field(x + 0.5 * h * k1, t + 0.5 * h)
    k3 = field(x + 0.5 * h * k2, t + 0.5 * h)
    k4 = field(x + h * k3, t + h)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Recorder:
    def __init__(self, stride):
        self.stride = stride
        self.times = []
        self.states = []
        self._since_last = 0

    def start(self, t, x):
        self.times = [t]
        self.states = [np.array(x)]
        self._since_last = 0

    def step(self, t, x, force=False):
        self._since_last += 1
        if force or self._since_last >= self.stride:
            self.times.append(t)
            self.states.append(np.array(x))
            self._since_last = 0

    def finish(self, j):
        return ArcSegment(j, np.asarray(self.times), np.asarray(self.states))


def simulate(spec: HybridSystemSpec, x0, cfg: SolverConfig, columns=None,
             meta=None) -> HybridArc:
    """Integrate a hybrid system from ``x0`` with classical RK4 flows.

    Flows advance with fixed step ``cfg.step`` (the final step of each flow
    interval is shortened to land exactly on the stop time).  Jumps fire at
    scheduled event times, or -- depending on ``cfg.priority`` -- whenever the
    state reaches the jump set.  Integration ends at ``cfg.t_final``, after
    ``cfg.j_max`` jumps, or with :class:`EscapeDetected` past the escape
    radius.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (spec.n,):
        raise DimensionMismatch(f"x0 has shape {x.shape}, system dimension is {spec.n}")
    tol = cfg.membership_tol
    if not (spec.flow_set(x, tol) or spec.jump_set(x, tol)):
        raise StuckState("initial state lies in neither the flow nor the jump set")

    rng = np.random.default_rng(cfg.seed)
    events = [e for e in (spec.event_schedule or []) if e.time <= cfg.t_final + _REL_TIME_EPS]
    next_event = 0
    t, j = 0.0, 0
    segments = []
    rec = _Recorder(cfg.record_every)
    rec.start(t, x)

    def check_escape(t, j, x):
        norm = float(np.linalg.norm(x))
        if norm > cfg.state_bound:
            raise EscapeDetected(t, j, norm)

    def take_jump(hint=None):
        nonlocal x, j
        segments.append(rec.finish(j))
        successors = spec.successors(x)
        x = spec.jump_selector(successors, x, hint, rng).copy()
        j += 1
        rec.start(t, x)

    check_escape(t, j, x)
    while True:
        # forced / priority jumps at the current point
        jumped = False
        while j < cfg.j_max and spec.jump_set(x, tol) and (
            cfg.priority == "jump"
            or (cfg.priority == "flow" and not spec.flow_set(x, tol))
        ):
            take_jump()
            check_escape(t, j, x)
            jumped = True
        if t >= cfg.t_final - _REL_TIME_EPS * max(1.0, cfg.t_final):
            break
        if not spec.flow_set(x, tol):
            if spec.jump_set(x, tol):
                break  # j_max exhausted while only jumping is allowed
            raise StuckState(f"state at (t={t:.6g}, j={j}) is in neither set")
        if jumped:
            continue

        # flow until the next scheduled event or the horizon
        t_stop = cfg.t_final
        event = None
        while next_event < len(events):
            if events[next_event].time > t + _REL_TIME_EPS * max(1.0, t):
                if events[next_event].time <= t_stop:
                    t_stop = events[next_event].time
                    event = events[next_event]
                break
            next_event += 1  # stale event at/behind current time

        span = t_stop - t
        n_full = int(np.floor(span / cfg.step + _REL_TIME_EPS))
        remainder = span - n_full * cfg.step
        if remainder < _REL_TIME_EPS * max(1.0, t_stop):
            remainder = 0.0
        t_base = t
        interrupted = False
        for i in range(n_full + (1 if remainder > 0 else 0)):
            h = cfg.step if i < n_full else remainder
            t_next = t_base + (i + 1) * cfg.step if i < n_full else t_stop
            x = _rk4_step(spec.flow_field, x, t, h)
            if cfg.projection is not None:
                x = _apply_projection(cfg.projection, x)
            t = t_next
            check_escape(t, j, x)
            is_last = (i == n_full + (1 if remainder > 0 else 0) - 1)
            trigger = (
                cfg.priority == "jump" and j < cfg.j_max and spec.jump_set(x, tol)
            ) or (
                cfg.priority == "flow" and not spec.flow_set(x, tol)
            )
            rec.step(t, x, force=is_last or trigger)
            if trigger:
                interrupted = True
                break
        if interrupted:
            continue
        t = t_stop

        if event is not None:
            next_event += 1
            if j >= cfg.j_max:
                break
            if not spec.jump_set(x, tol):
                raise ScheduleInfeasible(
                    f"scheduled jump at t={event.time:.6g} while the state is "
                    f"outside the jump set")
            take_jump(event.hint)
            check_escape(t, j, x)
        else:
            break

    segments.append(rec.finish(j))
    return HybridArc(segments, columns=columns, meta=meta)


def _apply_projection(projection, x):
    out = np.asarray(projection(x), dtype=float)
    if out.shape != x.shape:
        raise HalError("projection must preserve the state shape")
    return out


@dataclass
class ValidationReport:
    """Solution-condition residuals of an arc against a system spec."""

    max_flow_defect: float
    jump_violations: int
    in_set_violations: int

    @property
    def clean(self) -> bool:
        return self.jump_violations == 0 and self.in_set_violations == 0


def validate_arc(arc: HybridArc, spec: HybridSystemSpec, tol: float = 1e-6
                 ) -> ValidationReport:
    """Check an arc against the flow/jump conditions of a hybrid system.

    The flow defect is the worst infinity-norm residual between a central
    finite difference of the samples and the flow field at interior grid
    points.  Set membership is tested at every flow sample with slack
    ``tol``; the last sample of a jumping segment is the jump origin, which
    is governed by the jump-set condition instead.  Each jump is checked to
    depart from the jump set and land on one of the jump-map successors.
    """
    if arc.n and arc.n != spec.n:
        raise DimensionMismatch(f"arc dimension {arc.n} != system dimension {spec.n}")
    max_defect = 0.0
    in_set_violations = 0
    jump_violations = 0
    for idx, seg in enumerate(arc.segments):
        m = len(seg.times)
        if m > 1:
            m_flow = m if idx == len(arc.segments) - 1 else m - 1
            for k in range(m_flow):
                if not spec.flow_set(seg.states[k], tol):
                    in_set_violations += 1
            for k in range(1, m - 1):
                dt = seg.times[k + 1] - seg.times[k - 1]
                fd = (seg.states[k + 1] - seg.states[k - 1]) / dt
                f = spec.flow_field(seg.states[k], float(seg.times[k]))
                max_defect = max(max_defect, float(np.max(np.abs(fd - f))))
    for prev, nxt in zip(arc.segments[:-1], arc.segments[1:]):
        pre = prev.states[-1]
        post = nxt.states[0]
        bad = not spec.jump_set(pre, tol)
        if not bad:
            try:
                successors = spec.successors(pre)
                dist = min(float(np.max(np.abs(post - s))) for s in successors)
                bad = dist > tol
            except HalError:
                bad = True
        if bad:
            jump_violations += 1
    return ValidationReport(max_defect, jump_violations, in_set_violations)
