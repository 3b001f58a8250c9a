"""Second-order (Lie-bracket) averaging of oscillatory flows.

Given a flow ``eps**-1 * phi1 + phi2`` with phi1 of zero fast-timer mean, the
stabilizing average is recovered only at second order:

    f_bar(x, z) = (1/(T1*T2)) * iint ( phi2 + 0.5*[u1, phi1]_x ) dtau2 dtau1,

where ``u1`` is the running tau2-antiderivative of phi1 and
``[a, b]_x = dx(b) a - dx(a) b``.  The module evaluates u1, the bracket, the
split kernels psi_m/psi_p, the intermediate average h_bar, and f_bar itself,
plus the reduced control-affine form when phi1 = sum_l b_l(x,z,tau1) v_l(tau).

Full-period integrals use the composite trapezoid on uniform nodes
(spectrally accurate for smooth periodic integrands).  Running antiderivatives
on the period grid are computed spectrally from the same samples; the
standalone :func:`u1_eval` uses composite Simpson on a grid aligned to its
endpoint, as does the pointwise bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import LengthMismatch
from .oscillatory import OscillatoryFlowSpec, eval_on_tau2_grid, trapezoid_period
from .systems import HybridSystemSpec


@dataclass
class QuadratureConfig:
    nodes_tau1: int = 256
    nodes_tau2: int = 256
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.nodes_tau1 < 16 or self.nodes_tau2 < 16:
            raise ValueError("quadrature needs at least 16 nodes per period")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")


DEFAULT_QUAD = QuadratureConfig()


# ---------------------------------------------------------------------------
# elementary quadrature helpers
# ---------------------------------------------------------------------------

def _simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for n intervals (n even) of width h."""
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def spectral_antiderivative(samples: np.ndarray, period: float) -> np.ndarray:
    """Running integral from 0 of periodic samples, at the same grid nodes.

    ``samples`` has shape (N+1, ...) on the uniform grid 0..period including
    both endpoints.  The trigonometric interpolant of the samples is
    integrated exactly; a nonzero mean contributes its linear ramp.
    """
    n = samples.shape[0] - 1
    flat = samples[:n].reshape(n, -1)
    coeff = np.fft.rfft(flat, axis=0) / n
    m = np.arange(coeff.shape[0])
    omega = 2.0 * np.pi * m / period
    anti = np.zeros_like(coeff)
    anti[1:] = coeff[1:] / (1j * omega[1:, None])
    periodic = np.fft.irfft(anti * n, n=n, axis=0)
    periodic = np.vstack([periodic, periodic[:1]])
    periodic -= periodic[0]
    t = np.linspace(0.0, period, n + 1)
    ramp = np.multiply.outer(t, coeff[0].real)
    out = (periodic + ramp).reshape((n + 1,) + samples.shape[1:])
    return out


def jacobian_x(field: Callable, x, z, tau, h: float) -> np.ndarray:
    """Central finite-difference Jacobian of ``field(x, z, tau1, tau2)`` in x.

    The step is scaled by (1 + |x|) so the stencil stays well conditioned
    away from the origin.  Columns are the partials in each x component.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    tau1, tau2 = tau
    step = h * (1.0 + float(np.linalg.norm(x)))
    d = len(x)
    cols = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        fp = np.asarray(field(x + e, z, tau1, tau2), dtype=float)
        fm = np.asarray(field(x - e, z, tau1, tau2), dtype=float)
        cols.append((fp - fm) / (2.0 * step))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# grid profile: everything on one uniform tau2 period grid at fixed tau1
# ---------------------------------------------------------------------------

class Tau2Profile:
    """Samples of phi1/phi2, their running integrals, and bracket kernels."""

    __slots__ = ("grid", "phi1", "phi2", "jac_phi1", "u1", "jac_u1",
                 "bracket", "psi_m", "psi_p", "T2")

    def __init__(self, grid, phi1, phi2, jac_phi1, T2):
        self.grid = grid
        self.phi1 = phi1
        self.phi2 = phi2
        self.jac_phi1 = jac_phi1
        self.T2 = T2
        self.u1 = spectral_antiderivative(phi1, T2)
        self.jac_u1 = spectral_antiderivative(jac_phi1, T2)
        dphi_u = np.einsum("kij,kj->ki", jac_phi1, self.u1)
        du_phi = np.einsum("kij,kj->ki", self.jac_u1, phi1)
        self.bracket = dphi_u - du_phi
        self.psi_m = 0.5 * self.bracket
        self.psi_p = 0.5 * (dphi_u + du_phi)

    def average(self, values: np.ndarray) -> np.ndarray:
        return trapezoid_period(values, self.T2) / self.T2


def _jacobian_grid(spec: OscillatoryFlowSpec, x, z, tau1, grid,
                   quad: QuadratureConfig) -> np.ndarray:
    if spec.jac_phi1_x is not None:
        try:
            out = np.asarray(spec.jac_phi1_x(x, z, tau1, grid), dtype=float)
            if out.shape == (len(grid), spec.n1, spec.n1):
                return out
        except Exception:
            pass
        return np.stack([np.asarray(spec.jac_phi1_x(x, z, tau1, t2), dtype=float)
                         for t2 in grid])
    return np.stack([jacobian_x(spec.phi1, x, z, (tau1, t2), quad.fd_step)
                     for t2 in grid])


def tau2_profile(spec: OscillatoryFlowSpec, x, z, tau1: float,
                 quad: QuadratureConfig = DEFAULT_QUAD,
                 grid_offset: float = 0.0) -> Tau2Profile:
    """Build the tau2-grid profile at fixed (x, z, tau1).

    With a nonzero ``grid_offset`` the grid spans [offset, offset + T2] and
    the running integrals are anchored at the offset; period averages are
    unaffected by the anchor because phi1 has zero mean.
    """
    x = np.asarray(x, dtype=float)
    n2 = quad.nodes_tau2
    grid = np.linspace(0.0, spec.T2, n2 + 1) + grid_offset
    phi1 = eval_on_tau2_grid(spec.phi1, x, z, tau1, grid, spec.n1)
    phi2 = eval_on_tau2_grid(spec.phi2, x, z, tau1, grid, spec.n1)
    jac1 = _jacobian_grid(spec, x, z, tau1, grid, quad)
    return Tau2Profile(grid, phi1, phi2, jac1, spec.T2)


# ---------------------------------------------------------------------------
# pointwise operations
# ---------------------------------------------------------------------------

def _aligned_simpson_grid(tau2: float, T2: float, nodes_per_period: int):
    """Uniform Simpson grid on [0, tau2] with density tied to the period."""
    n = max(2, int(np.ceil(nodes_per_period * tau2 / T2)))
    if n % 2:
        n += 1
    return np.linspace(0.0, tau2, n + 1), n


def u1_eval(spec: OscillatoryFlowSpec, x, z, tau1, tau2,
            quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Running antiderivative of phi1 in the fast timer, from 0 to tau2.

    tau2 is reduced modulo T2 first (valid because phi1 has zero mean over a
    period); the integral uses composite Simpson on a grid aligned to tau2.
    """
    tau2 = float(tau2) % spec.T2
    if tau2 == 0.0:
        return np.zeros(spec.n1)
    grid, n = _aligned_simpson_grid(tau2, spec.T2, quad.nodes_tau2)
    vals = eval_on_tau2_grid(spec.phi1, x, z, tau1, grid, spec.n1)
    w = _simpson_weights(n, grid[1] - grid[0])
    return w @ vals


def _jac_u1_point(spec, x, z, tau1, tau2, quad):
    """d/dx of u1 at a point, by integrating the phi1 Jacobian."""
    tau2 = float(tau2) % spec.T2
    if tau2 == 0.0:
        return np.zeros((spec.n1, spec.n1))
    grid, n = _aligned_simpson_grid(tau2, spec.T2, quad.nodes_tau2)
    jacs = _jacobian_grid(spec, x, z, tau1, grid, quad)
    w = _simpson_weights(n, grid[1] - grid[0])
    return np.einsum("k,kij->ij", w, jacs)


def _jac_phi1_point(spec, x, z, tau1, tau2, quad):
    if spec.jac_phi1_x is not None:
        return np.asarray(spec.jac_phi1_x(x, z, tau1, tau2), dtype=float)
    return jacobian_x(spec.phi1, x, z, (tau1, tau2), quad.fd_step)


def lie_bracket_x(spec: OscillatoryFlowSpec, x, z, tau,
                  quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """[u1, phi1]_x = dx(phi1) u1 - dx(u1) phi1 at one (x, z, tau1, tau2)."""
    tau1, tau2 = tau
    x = np.asarray(x, dtype=float)
    u1 = u1_eval(spec, x, z, tau1, tau2, quad)
    phi1 = np.asarray(spec.phi1(x, z, tau1, tau2), dtype=float)
    jac_phi1 = _jac_phi1_point(spec, x, z, tau1, tau2, quad)
    jac_u1 = _jac_u1_point(spec, x, z, tau1, tau2, quad)
    return jac_phi1 @ u1 - jac_u1 @ phi1


def field_bracket(f: Callable, g: Callable, x, z, tau, h: float = 1e-5):
    """Generic bracket [f, g]_x = dx(g) f - dx(f) g with FD Jacobians."""
    x = np.asarray(x, dtype=float)
    tau1, tau2 = tau
    jf = jacobian_x(f, x, z, tau, h)
    jg = jacobian_x(g, x, z, tau, h)
    fv = np.asarray(f(x, z, tau1, tau2), dtype=float)
    gv = np.asarray(g(x, z, tau1, tau2), dtype=float)
    return jg @ fv - jf @ gv


def psi_eval(spec: OscillatoryFlowSpec, x, z, tau,
             quad: QuadratureConfig = DEFAULT_QUAD):
    """Split bracket kernels: psi_m = (A - B)/2, psi_p = (A + B)/2 with
    A = dx(phi1) u1 and B = dx(u1) phi1.  psi_p integrates to zero over one
    fast period; psi_m is half the Lie bracket."""
    tau1, tau2 = tau
    x = np.asarray(x, dtype=float)
    u1 = u1_eval(spec, x, z, tau1, tau2, quad)
    phi1 = np.asarray(spec.phi1(x, z, tau1, tau2), dtype=float)
    a = _jac_phi1_point(spec, x, z, tau1, tau2, quad) @ u1
    b = _jac_u1_point(spec, x, z, tau1, tau2, quad) @ phi1
    return 0.5 * (a - b), 0.5 * (a + b)


# ---------------------------------------------------------------------------
# averages
# ---------------------------------------------------------------------------

def h_bar_eval(spec: OscillatoryFlowSpec, x, z, tau1,
               quad: QuadratureConfig = DEFAULT_QUAD,
               grid_offset: float = 0.0) -> np.ndarray:
    """Fast-timer average (1/T2) * int (phi2 + psi_m) dtau2 at fixed tau1."""
    prof = tau2_profile(spec, x, z, tau1, quad, grid_offset)
    return prof.average(prof.phi2 + prof.psi_m)


def bracket_tau2_average(spec: OscillatoryFlowSpec, x, z, tau1,
                         quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """(1/T2) * int 0.5*[u1, phi1]_x dtau2 at fixed tau1 (generic path)."""
    prof = tau2_profile(spec, x, z, tau1, quad)
    return prof.average(prof.psi_m)


def f_bar_eval(spec: OscillatoryFlowSpec, x, z,
               quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Second-order average: double period quadrature of phi2 + half-bracket."""
    n1 = quad.nodes_tau1
    t1s = np.linspace(0.0, spec.T1, n1 + 1)
    rows = np.stack([h_bar_eval(spec, x, z, t1, quad) for t1 in t1s])
    return trapezoid_period(rows, spec.T1) / spec.T1


def first_order_average(spec: OscillatoryFlowSpec, x, z, tau1,
                        quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Naive fast-timer mean (1/T2) * int phi1 dtau2 (zero for valid specs)."""
    prof = tau2_profile(spec, x, z, tau1, quad)
    return prof.average(prof.phi1)


def control_affine_bracket_average(bs, vs, x, z, tau1,
                                   quad: QuadratureConfig = DEFAULT_QUAD,
                                   T2: float = 2.0 * np.pi) -> np.ndarray:
    """Reduced half-bracket average for phi1 = sum_l b_l(x,z,tau1) v_l(tau).

    Evaluates 0.5 * sum_{l1 > l2} [b_l1, b_l2]_x * Lambda_{l1,l2}(tau1) where
    Lambda is the fast-timer mean of V_l1 v_l2 - V_l2 v_l1 and V_l is the
    running integral of v_l; the weights come from nested quadrature on the
    period grid over [0, T2].  Must agree with the generic half-bracket
    average of the assembled phi1.
    """
    if len(bs) != len(vs):
        raise LengthMismatch(f"{len(bs)} vector fields vs {len(vs)} waveforms")
    r = len(bs)
    x = np.asarray(x, dtype=float)
    d = len(x)
    out = np.zeros(d)
    if r < 2:
        return out
    n2 = quad.nodes_tau2
    grid = np.linspace(0.0, T2, n2 + 1)
    vals = np.stack([np.array([float(v(tau1, t2)) for t2 in grid]) for v in vs])
    antis = np.stack([spectral_antiderivative(vals[l], T2) for l in range(r)])
    b_at = [np.asarray(b(x, z, tau1), dtype=float) for b in bs]
    jac_at = []
    step = quad.fd_step * (1.0 + float(np.linalg.norm(x)))
    for b in bs:
        cols = []
        for i in range(d):
            e = np.zeros(d)
            e[i] = step
            cols.append((np.asarray(b(x + e, z, tau1), dtype=float)
                         - np.asarray(b(x - e, z, tau1), dtype=float)) / (2 * step))
        jac_at.append(np.stack(cols, axis=1))
    for l1 in range(r):
        for l2 in range(l1):
            lam = trapezoid_period(antis[l1] * vals[l2] - antis[l2] * vals[l1], T2) / T2
            bracket = jac_at[l2] @ b_at[l1] - jac_at[l1] @ b_at[l2]
            out += 0.5 * float(lam) * bracket
    return out


@dataclass
class AveragedSystemSpec:
    """Timer-free averaged flow paired with the oscillatory source data."""

    f_bar: Callable[[np.ndarray, np.ndarray], np.ndarray]
    source: OscillatoryFlowSpec


def averaged_flow(spec: OscillatoryFlowSpec,
                  quad: QuadratureConfig = DEFAULT_QUAD,
                  memo_decimals: Optional[int] = None) -> AveragedSystemSpec:
    """Wrap f_bar evaluation as a timer-free (x, z) -> velocity callable.

    ``memo_decimals`` optionally caches values on states rounded to that many
    decimals; exact re-evaluation is the default.
    """
    if memo_decimals is None:
        def f_bar(x, z):
            return f_bar_eval(spec, x, z, quad)
    else:
        cache: dict = {}

        def f_bar(x, z):
            key = (tuple(np.round(np.asarray(x, float), memo_decimals)),
                   tuple(np.atleast_1d(np.round(np.asarray(z, float),
                                                memo_decimals))))
            if key not in cache:
                cache[key] = f_bar_eval(spec, x, z, quad)
            return cache[key]

    return AveragedSystemSpec(f_bar=f_bar, source=spec)


def build_average_system(hds: HybridSystemSpec,
                         quad: QuadratureConfig = DEFAULT_QUAD,
                         memo_decimals: Optional[int] = None) -> HybridSystemSpec:
    """Averaged hybrid system: same sets and jump data, flow from f_bar.

    The input system must carry an :class:`OscillatoryBinding` with state
    layout [x | z | tau1, tau2].  The averaged system drops the two timers;
    its flow pairs the quadrature average on the x block with the bound
    z-block rates, and its sets/jumps delegate to the original predicates
    and jump map with zero timers appended.
    """
    binding = hds.oscillatory
    if binding is None:
        raise ValueError("system carries no oscillatory flow to average")
    avg = averaged_flow(binding.flow, quad, memo_decimals)
    n1, nz = binding.n1, binding.nz
    n_red = n1 + nz

    def pad(state):
        return np.concatenate([state, [0.0, 0.0]])

    def flow_field(state, t):
        x = state[:n1]
        z = state[n1:]
        vel = np.empty(n_red)
        vel[:n1] = avg.f_bar(x, z)
        if nz:
            zr = binding.z_rates(pad(state)) if binding.z_rates else np.zeros(nz)
            vel[n1:] = zr
        return vel

    def flow_set(state, tol):
        return hds.flow_set(pad(state), tol)

    def jump_set(state, tol):
        return hds.jump_set(pad(state), tol)

    def jump_map(state):
        return [s[:n_red] for s in hds.jump_map(pad(state))]

    out = HybridSystemSpec(
        n=n_red,
        flow_set=flow_set,
        flow_field=flow_field,
        jump_set=jump_set,
        jump_map=jump_map,
        jump_selector=hds.jump_selector,
        event_schedule=list(hds.event_schedule) if hds.event_schedule else None,
    )
    out.averaged = avg
    return out
