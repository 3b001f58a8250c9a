"""(T, rho)-closeness between hybrid arcs and practical-stability checks.

Two arcs are (T, rho)-close when every sample of either arc with t + j <= T
has a counterpart on the other arc in the *same* jump segment, within rho in
time and within rho in state.  The state match scans the partner segment with
piecewise-linear interpolation, so the metric tolerates the sampling grid
(interpolation error is folded into the caller's tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .arcs import HybridArc
from .errors import DimensionMismatch, HalError

_BOUNDARY_SLACK = 1e-9


@dataclass
class ClosenessReport:
    T: float
    rho_min: float
    witness: Optional[tuple] = None  # ((t, j), (s, j), distance)


@dataclass
class StabilityVerdict:
    nu: float
    settle_time: float
    overshoot_ratio: float
    passed: bool


@dataclass
class IndicatorSpec:
    """Proper-indicator surrogate for a target set.

    Exactly one of ``points`` (finite point list, distance to nearest),
    ``distance`` (callable x -> |x|_A), or the product form ``point`` x
    ``box`` (distance to {p} x [lo, hi]) must describe the target.
    ``components`` optionally projects the state before evaluation.
    """

    points: Optional[np.ndarray] = None
    distance: Optional[Callable[[np.ndarray], float]] = None
    point: Optional[np.ndarray] = None
    box: Optional[tuple] = None
    components: Optional[Sequence[int]] = None
    basin_note: str = ""

    def __post_init__(self):
        forms = [self.points is not None, self.distance is not None,
                 self.point is not None and self.box is not None]
        if sum(forms) != 1:
            raise HalError("indicator needs exactly one target description")
        if self.points is not None:
            self.points = np.atleast_2d(np.asarray(self.points, dtype=float))

    def __call__(self, state: np.ndarray) -> float:
        x = np.asarray(state, dtype=float)
        if self.components is not None:
            x = x[list(self.components)]
        if self.distance is not None:
            return float(self.distance(x))
        if self.points is not None:
            return float(np.min(np.linalg.norm(self.points - x, axis=1)))
        p = np.asarray(self.point, dtype=float)
        lo, hi = (np.asarray(v, dtype=float) for v in self.box)
        head = x[: len(p)] - p
        tail = x[len(p):]
        excess = np.maximum(lo - tail, 0.0) + np.maximum(tail - hi, 0.0)
        return float(np.sqrt(np.sum(head**2) + np.sum(excess**2)))

    def check_zero_on(self, targets, tol: float = 1e-12) -> bool:
        return all(self(np.asarray(t, dtype=float)) <= tol for t in targets)


# ---------------------------------------------------------------------------
# (T, rho)-closeness
# ---------------------------------------------------------------------------

def _segment_match_costs(ta, xa, tb, yb, rho):
    """For each sample (ta_i, xa_i), the smallest state distance to the
    partner polyline restricted to |s - ta_i| <= rho, or +inf if the time
    window misses the partner segment entirely."""
    na = len(ta)
    out = np.full(na, np.inf)
    if len(tb) == 1:
        ok = np.abs(ta - tb[0]) <= rho + _BOUNDARY_SLACK
        d = np.linalg.norm(xa - yb[0], axis=1)
        out[ok] = d[ok]
        return out
    lo = np.maximum(ta - rho, tb[0])
    hi = np.minimum(ta + rho, tb[-1])
    feasible = lo <= hi + _BOUNDARY_SLACK
    if not np.any(feasible):
        return out
    k_lo = np.clip(np.searchsorted(tb, lo, side="right") - 1, 0, len(tb) - 2)
    k_hi = np.clip(np.searchsorted(tb, hi, side="right") - 1, 0, len(tb) - 2)
    width = int(np.max(np.where(feasible, k_hi - k_lo, 0))) + 1
    best = np.full(na, np.inf)
    for off in range(width):
        k = np.minimum(k_lo + off, k_hi)
        s0, s1 = tb[k], tb[k + 1]
        p0, p1 = yb[k], yb[k + 1]
        seg_lo = np.maximum(lo, s0)
        seg_hi = np.minimum(hi, s1)
        valid = feasible & (seg_lo <= seg_hi + _BOUNDARY_SLACK) & (k_lo + off <= k_hi)
        dt = s1 - s0
        dirv = (p1 - p0) / dt[:, None]
        rel = xa - p0
        denom = np.sum(dirv * dirv, axis=1)
        tstar = np.where(denom > 0, np.sum(rel * dirv, axis=1) / np.maximum(denom, 1e-300), 0.0)
        s_star = np.clip(s0 + tstar, seg_lo, seg_hi)
        closest = p0 + (s_star - s0)[:, None] * dirv
        d = np.linalg.norm(xa - closest, axis=1)
        best = np.where(valid, np.minimum(best, d), best)
    return best


def _direction_ok(a: HybridArc, b: HybridArc, T: float, rho: float):
    """Check the one-sided condition; returns (ok, worst witness)."""
    worst = (-np.inf, None)
    for seg in a.segments:
        budget = T - seg.j + _BOUNDARY_SLACK
        keep = seg.times <= budget
        if not np.any(keep):
            break
        other = b.segment(seg.j)
        if other is None:
            t_bad = float(seg.times[keep][0])
            return False, (np.inf, ((t_bad, seg.j), None, np.inf))
        ta = seg.times[keep]
        xa = seg.states[keep]
        costs = _segment_match_costs(ta, xa, other.times, other.states, rho)
        i = int(np.argmax(costs))
        if costs[i] > worst[0]:
            s_near = float(np.clip(ta[i], other.times[0], other.times[-1]))
            worst = (float(costs[i]), ((float(ta[i]), seg.j), (s_near, seg.j),
                                       float(costs[i])))
        if costs[i] > rho + _BOUNDARY_SLACK:
            return False, worst
    return True, worst


def is_T_rho_close(a: HybridArc, b: HybridArc, T: float, rho: float) -> bool:
    """Both directional conditions of (T, rho)-closeness on sampled arcs."""
    if a.n != b.n:
        raise DimensionMismatch(f"arc dimensions differ: {a.n} vs {b.n}")
    ok_ab, _ = _direction_ok(a, b, T, rho)
    if not ok_ab:
        return False
    ok_ba, _ = _direction_ok(b, a, T, rho)
    return ok_ba


def min_rho(a: HybridArc, b: HybridArc, T: float, tol: float = 1e-3) -> ClosenessReport:
    """Minimal rho making the arcs (T, rho)-close, by bisection.

    The upper bracket is the coarse bound max-state-distance + horizon; the
    result is accurate to ``tol``.
    """
    if tol <= 0:
        raise HalError("tolerance must be positive")
    if a.n != b.n:
        raise DimensionMismatch(f"arc dimensions differ: {a.n} vs {b.n}")
    scale = 0.0
    for arc in (a, b):
        for seg in arc.segments:
            scale = max(scale, float(np.max(np.abs(seg.states))) if seg.states.size else 0.0)
    rho_hi = 2.0 * scale + T + 1.0
    if is_T_rho_close(a, b, T, 0.0):
        return ClosenessReport(T=T, rho_min=0.0, witness=None)
    if not is_T_rho_close(a, b, T, rho_hi):
        raise HalError("arcs are not close within the coarse upper bound "
                       "(jump structures likely differ)")
    lo, hi = 0.0, rho_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_T_rho_close(a, b, T, mid):
            hi = mid
        else:
            lo = mid
    _, w_ab = _direction_ok(a, b, T, hi)
    _, w_ba = _direction_ok(b, a, T, hi)
    witness = w_ab[1] if w_ab[0] >= w_ba[0] else w_ba[1]
    return ClosenessReport(T=T, rho_min=hi, witness=witness)


# ---------------------------------------------------------------------------
# practical stability
# ---------------------------------------------------------------------------

def practical_stability_check(arc: HybridArc, ind: IndicatorSpec, nu: float,
                              c_overshoot: float, horizon: float) -> StabilityVerdict:
    """Empirical convergence-envelope check on an arc.

    Passes when the indicator stays below c * omega(0) + nu everywhere on
    t + j <= horizon and falls below nu from some settle time onward.
    """
    pts = [(t, j, ind(x)) for (t, j, x) in arc.samples() if t + j <= horizon + _BOUNDARY_SLACK]
    if not pts:
        raise HalError("arc has no samples inside the horizon")
    omega0 = pts[0][2]
    values = np.array([w for (_, _, w) in pts])
    overshoot = float(np.max(values) / omega0) if omega0 > 0 else 1.0
    bound = c_overshoot * omega0 + nu
    within_envelope = bool(np.all(values <= bound + _BOUNDARY_SLACK))
    settle_time = np.inf
    above = values > nu + _BOUNDARY_SLACK
    if not above[-1]:
        last_above = int(np.max(np.nonzero(above)[0])) if np.any(above) else -1
        settle_time = float(pts[last_above + 1][0])
    passed = bool(within_envelope and np.isfinite(settle_time))
    return StabilityVerdict(nu=nu, settle_time=float(settle_time),
                            overshoot_ratio=overshoot, passed=passed)
