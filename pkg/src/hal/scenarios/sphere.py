"""Global extremum seeking on the unit sphere via hysteresis switching.

A single warped height cost has a spurious critical point antipodal to the
minimizer, so no single smooth controller can converge globally.  Two warped
copies of the cost (small rotations of opposite sense about the e2 axis,
active only on the far hemisphere) disagree away from the minimizer; a
hysteresis rule jumps to the mode of smaller warped cost whenever the active
mode's cost exceeds the pointwise minimum by the gap delta, and each such
jump drops the Lyapunov value by at least delta.

The probing flow rotates the state about the three coordinate axes at
distinct integer frequencies; its slow behavior is projected gradient
descent of the active warped cost on the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ..closeness import IndicatorSpec
from ..errors import DeltaOutOfRange, FrequencyCollision, OffManifold
from ..oscillatory import OscillatoryFlowSpec, common_period
from ..systems import HybridSystemSpec, OscillatoryBinding
from .base import ScenarioSystem, mode_value

TWO_PI = 2.0 * np.pi
E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class SphereEsParams:
    frequencies: Sequence = (3, 2, 1)
    delta: float = 0.2
    k_warp: tuple[float, float] = (0.5, -0.5)
    eps: float = 1.0 / np.sqrt(10.0 * np.pi)
    x0: Optional[Sequence[float]] = None
    mode0: int = 1
    t_final: float = 20.0
    seed: int = 0
    manifold_tol: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.delta < 0.25):
            raise DeltaOutOfRange(f"delta must lie in (0, 1/4), got {self.delta}")
        self.frequencies = [Fraction(w) if not isinstance(w, (tuple, list))
                            else Fraction(int(w[0]), int(w[1]))
                            for w in self.frequencies]
        if len(set(self.frequencies)) != len(self.frequencies):
            raise FrequencyCollision("probing frequencies must be distinct")
        if self.x0 is None:
            self.x0 = np.array([1e-3, 0.0, -1.0])
        self.x0 = np.asarray(self.x0, dtype=float)
        self.x0 = self.x0 / np.linalg.norm(self.x0)


def cost(x) -> float:
    """Height cost 1 - <x, e3>, minimized at the north pole."""
    return 1.0 - float(np.asarray(x)[2])


def _rot_y(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def warp_angle(x, k: float) -> float:
    j = cost(x)
    if j < 1.0:
        return 0.0
    return 0.5 * k * (j - 1.0) ** 2


def warp_map(x, k: float) -> np.ndarray:
    """Identity on the near hemisphere, rotation about e2 past the equator."""
    x = np.asarray(x, dtype=float)
    theta = warp_angle(x, k)
    if theta == 0.0 and cost(x) < 1.0:
        return x.copy()
    return _rot_y(theta) @ x


def warped_cost(x, k: float) -> float:
    return cost(warp_map(x, k))


def warped_cost_grad(x, k: float) -> np.ndarray:
    """Euclidean gradient of the warped cost (closed form).

    For J >= 1 the chain rule through x -> R(theta(x)) x gives
    -R(theta)^T e3 - k (J - 1) (R(theta) x)_1 e3; on the near hemisphere the
    gradient is the constant -e3.
    """
    x = np.asarray(x, dtype=float)
    j = cost(x)
    if j < 1.0:
        return -E3.copy()
    theta = 0.5 * k * (j - 1.0) ** 2
    R = _rot_y(theta)
    g = -(R.T @ E3)
    g[2] -= k * (j - 1.0) * float((R @ x)[0])
    return g


def synergistic_eval(q: int, x, params: SphereEsParams) -> float:
    """Warped cost of mode q at a sphere point (rejects off-manifold input)."""
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > params.manifold_tol:
        raise OffManifold(f"|x| = {np.linalg.norm(x):.8f} is not on the sphere")
    return warped_cost(x, params.k_warp[q - 1])


def hysteresis_gap(x, q: int, params: SphereEsParams) -> float:
    """Active-mode excess over the pointwise best mode."""
    vals = [warped_cost(x, k) for k in params.k_warp]
    return vals[q - 1] - min(vals)


def tangent_projection(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.eye(3) - np.outer(x, x) / float(x @ x)


def make_sphere_flow(params: SphereEsParams) -> OscillatoryFlowSpec:
    w = np.array([float(f) for f in params.frequencies])
    amp = np.sqrt(2.0 * w)
    T2 = common_period(params.frequencies)
    ks = params.k_warp
    skews = [np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
             np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
             np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])]
    # rows of bmat are b_i(x) = e_i x x = -skew(e_i) x ... using cross directly
    eye = np.eye(3)

    def fields(x):
        return np.stack([np.cross(eye[i], x) for i in range(3)])

    def phi1(x, z, tau1, tau2):
        x = np.asarray(x, dtype=float)
        q = int(round(mode_value(z)))
        jt = warped_cost(x, ks[q - 1])
        t2 = np.asarray(tau2, dtype=float)
        waves = amp * np.cos(np.multiply.outer(t2, w) + jt)  # (..., 3)
        return waves @ fields(x)

    def phi2(x, z, tau1, tau2):
        if np.ndim(tau2) == 0:
            return np.zeros(3)
        return np.zeros((len(np.atleast_1d(tau2)), 3))

    def jac_phi1(x, z, tau1, tau2):
        x = np.asarray(x, dtype=float)
        q = int(round(mode_value(z)))
        k = ks[q - 1]
        jt = warped_cost(x, k)
        g = warped_cost_grad(x, k)
        bmat = fields(x)
        t2 = np.atleast_1d(np.asarray(tau2, dtype=float))
        cosw = amp * np.cos(np.multiply.outer(t2, w) + jt)   # (m, 3)
        sinw = amp * np.sin(np.multiply.outer(t2, w) + jt)
        out = np.einsum("mr,rij->mij", cosw, np.stack(skews)) \
            - np.einsum("mr,ri,j->mij", sinw, bmat, g)
        if np.ndim(tau2) == 0:
            return out[0]
        return out

    return OscillatoryFlowSpec(n1=3, phi1=phi1, phi2=phi2, T1=TWO_PI, T2=T2,
                               jac_phi1_x=jac_phi1)


def sphere_affine_decomposition(params: SphereEsParams):
    """Rotation fields modulated by the warped cost, split into cos/sin parts."""
    w = [float(f) for f in params.frequencies]
    ks = params.k_warp
    eye = np.eye(3)
    bs, vs = [], []
    for i in range(3):
        amp = float(np.sqrt(2.0 * w[i]))

        def b_cos(x, z, tau1, i=i):
            q = int(round(mode_value(z)))
            return np.cos(warped_cost(x, ks[q - 1])) * np.cross(eye[i], x)

        def b_sin(x, z, tau1, i=i):
            q = int(round(mode_value(z)))
            return -np.sin(warped_cost(x, ks[q - 1])) * np.cross(eye[i], x)

        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.cos(wi * t2))
        vs.append(lambda t1, t2, wi=w[i], a=amp: a * np.sin(wi * t2))
        bs.extend([b_cos, b_sin])
    return bs, vs


def build_sphere_es(params: Optional[SphereEsParams] = None
                    ) -> tuple[ScenarioSystem, Callable]:
    """Assemble the hysteresis-switched sphere seeker and its slow model.

    State layout [x (3) | mode | tau1, tau2].  Jumps are state-triggered:
    the jump set is {gap >= delta} and the jump map lands on the modes of
    minimal warped cost (smallest index on ties).  The per-step retraction
    renormalizes the sphere block.  ``analytic_average(x, mode)`` is the
    negated tangent projection of the warped-cost gradient.
    """
    params = params or SphereEsParams()
    osc = make_sphere_flow(params)
    eps = params.eps
    rate1, rate2 = 1.0 / eps, 1.0 / eps**2
    delta = params.delta
    n_modes = len(params.k_warp)

    def flow_field(state, t):
        x, z1 = state[:3], state[3]
        tau1, tau2 = state[4], state[5]
        vel = np.empty(6)
        vel[:3] = np.asarray(osc.phi1(x, z1, tau1, tau2)) / eps
        vel[3] = 0.0
        vel[4] = rate1
        vel[5] = rate2
        return vel

    def on_sphere(state, tol):
        return abs(np.linalg.norm(state[:3]) - 1.0) <= params.manifold_tol

    def flow_set(state, tol):
        q = int(round(state[3]))
        if q < 1 or q > n_modes or not on_sphere(state, tol):
            return False
        return hysteresis_gap(state[:3], q, params) <= delta + tol

    def jump_set(state, tol):
        q = int(round(state[3]))
        if q < 1 or q > n_modes or not on_sphere(state, tol):
            return False
        return hysteresis_gap(state[:3], q, params) >= delta - tol

    def jump_map(state):
        x = state[:3]
        vals = [warped_cost(x, k) for k in params.k_warp]
        best = min(vals)
        succ = []
        for q in range(1, n_modes + 1):
            if vals[q - 1] <= best + 1e-12:
                s = state.copy()
                s[3] = float(q)
                succ.append(s)
        return succ

    def projection(state):
        out = state.copy()
        out[:3] = out[:3] / np.linalg.norm(out[:3])
        return out

    system = HybridSystemSpec(
        n=6,
        flow_set=flow_set,
        flow_field=flow_field,
        jump_set=jump_set,
        jump_map=jump_map,
        oscillatory=OscillatoryBinding(flow=osc, eps=eps, n1=3, nz=1,
                                       mode_index=3),
    )

    def analytic_average(x, z):
        x = np.asarray(x, dtype=float)
        q = int(round(mode_value(z)))
        g = warped_cost_grad(x, params.k_warp[q - 1])
        b = np.stack([np.cross(np.eye(3)[i], x) for i in range(3)])
        return -(b.T @ (b @ g))

    def sample_state(rng):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        mode = float(rng.integers(1, n_modes + 1))
        return v, mode

    x0 = np.concatenate([params.x0, [float(params.mode0), 0.0, 0.0]])
    scenario = ScenarioSystem(
        name="sphere",
        osc=osc,
        eps=eps,
        system=system,
        analytic_average=analytic_average,
        indicator=IndicatorSpec(
            distance=lambda x: geodesic_distance(x, E3),
            components=(0, 1, 2)),
        x0=x0,
        columns=("x_1", "x_2", "x_3", "z1", "tau1", "tau2"),
        t_final=params.t_final,
        seed=params.seed,
        projection=projection,
        priority="jump",
        j_max=100,
        affine_decomposition=sphere_affine_decomposition(params),
        sample_state=sample_state,
    )
    scenario.params = params
    return scenario, analytic_average


def geodesic_distance(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def spurious_critical_point(params: SphereEsParams, q: int = 1) -> np.ndarray:
    """Warped maximum of mode q on the x1-x3 meridian, by root finding.

    On the meridian x = (sin p, 0, cos p) the warped cost is
    1 - cos(p + theta(p)) with theta(p) = (k/2) cos(p)^2, so the spurious
    critical point solves p + theta(p) = pi.
    """
    k = params.k_warp[q - 1]

    def eqn(p):
        return p + 0.5 * k * np.cos(p) ** 2 - np.pi

    p = brentq(eqn, 0.5 * np.pi, 1.5 * np.pi)
    return np.array([np.sin(p), 0.0, np.cos(p)])


def estimate_synergy_gap(params: SphereEsParams, meridian_nodes: int = 20001
                         ) -> dict:
    """Diagnostics for the hysteresis geometry of the warped pair.

    Returns the synergy constant (smallest cross-mode cost drop available at
    a spurious critical point) and the largest hysteresis gap anywhere on the
    sphere; jumps can fire only when delta is below the latter, and the
    switching logic escapes every spurious point only when delta is below
    the former.
    """
    gap_crit = np.inf
    for q in (1, 2):
        xc = spurious_critical_point(params, q)
        vals = [warped_cost(xc, k) for k in params.k_warp]
        gap_crit = min(gap_crit, vals[q - 1] - min(vals))
    # the gap |J1 - J2| = 2 |sin(k1/2 x3^2) x1| is extremal on the meridian
    p = np.linspace(0.5 * np.pi, np.pi, meridian_nodes)
    xs = np.stack([np.sin(p), np.zeros_like(p), np.cos(p)], axis=1)
    gaps = [abs(warped_cost(x, params.k_warp[0]) - warped_cost(x, params.k_warp[1]))
            for x in xs]
    return {
        "synergy_constant": float(gap_crit),
        "max_gap": float(np.max(gaps)),
        "delta": params.delta,
        "jumps_possible": bool(params.delta <= float(np.max(gaps))),
        "escapes_critical_points": bool(params.delta < gap_crit),
    }
