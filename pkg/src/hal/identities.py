"""Numerically checkable identities tying the averaging machinery together.

Each check evaluates a residual that the theory says vanishes (or a pair of
computation paths that must agree) on seeded probe states of a scenario:

* zero fast-timer mean of the dominant term,
* zero period-average of the symmetric kernel psi_p,
* fundamental-theorem check d/dtau2 u1 = phi1,
* consistency of the double average with the tau1 average of h_bar,
* agreement of the reduced control-affine bracket path with the generic one,
* antisymmetry of the two-field bracket,
* agreement of the quadrature average with the scenario's closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averaging import (QuadratureConfig, bracket_tau2_average,
                        control_affine_bracket_average, f_bar_eval,
                        field_bracket, h_bar_eval, tau2_profile, u1_eval)
from .oscillatory import trapezoid_period, verify_regularity
from .scenarios.base import ScenarioSystem


@dataclass
class IdentityResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} (tol {self.tol:.0e})"


def _probe_states(scn: ScenarioSystem, count: int, seed: int):
    rng = np.random.default_rng(seed)
    states = scn.random_states(count, seed=seed)
    taus = rng.uniform(0.0, [scn.osc.T1, scn.osc.T2], size=(count, 2))
    return [(x, z, t1, t2) for (x, z), (t1, t2) in zip(states, taus)]


def run_identity_suite(scn: ScenarioSystem, quad: QuadratureConfig | None = None,
                       n_states: int = 5, seed: int = 0) -> list[IdentityResult]:
    quad = quad or scn.quad
    osc = scn.osc
    probes = _probe_states(scn, n_states, seed)
    results = []

    reg = verify_regularity(osc, probes, quad_nodes=quad.nodes_tau2)
    results.append(IdentityResult("zero-mean of dominant term", reg.zero_mean_residual, 1e-8))
    results.append(IdentityResult(
        "periodicity residual", max(reg.periodicity_residual_1,
                                    reg.periodicity_residual_2), 1e-8))

    # psi_p integrates to zero over one fast period
    worst = 0.0
    for (x, z, t1, _) in probes:
        prof = tau2_profile(osc, x, z, t1, quad)
        worst = max(worst, float(np.max(np.abs(
            trapezoid_period(prof.psi_p, osc.T2)))))
    results.append(IdentityResult("psi_p period average", worst, 1e-8))

    # d/dtau2 of u1 equals phi1 (relative to the probe-set scale of phi1)
    delta = 1e-4 * osc.T2
    err = 0.0
    scale = 0.0
    for (x, z, t1, t2) in probes:
        fd = (u1_eval(osc, x, z, t1, t2 + delta, quad)
              - u1_eval(osc, x, z, t1, t2 - delta, quad)) / (2 * delta)
        ref = np.asarray(osc.phi1(x, z, t1, t2), dtype=float)
        err = max(err, float(np.max(np.abs(fd - ref))))
        scale = max(scale, float(np.max(np.abs(ref))))
    results.append(IdentityResult("running-integral derivative", err / max(scale, 1e-12), 1e-4))

    # double average equals the tau1 average of h_bar (different node counts)
    alt = QuadratureConfig(nodes_tau1=quad.nodes_tau1 + 64,
                           nodes_tau2=quad.nodes_tau2, fd_step=quad.fd_step)
    worst = 0.0
    for (x, z, _, _) in probes[:3]:
        fb = f_bar_eval(osc, x, z, quad)
        grid = np.linspace(0.0, osc.T1, alt.nodes_tau1 + 1)
        rows = np.stack([h_bar_eval(osc, x, z, t1, quad) for t1 in grid])
        hbar_avg = trapezoid_period(rows, osc.T1) / osc.T1
        worst = max(worst, float(np.max(np.abs(fb - hbar_avg))))
    results.append(IdentityResult("h_bar consistency", worst, 1e-8))

    # reduced control-affine path vs generic bracket average
    if scn.affine_decomposition is not None:
        bs, vs = scn.affine_decomposition
        worst = 0.0
        for (x, z, t1, _) in probes[:3]:
            reduced = control_affine_bracket_average(bs, vs, x, z, t1, quad,
                                                     T2=osc.T2)
            generic = bracket_tau2_average(osc, x, z, t1, quad)
            worst = max(worst, float(np.max(np.abs(reduced - generic))))
        results.append(IdentityResult("control-affine bracket path", worst, 1e-6))

    # bracket antisymmetry through independent finite differencing
    worst = 0.0
    for (x, z, t1, t2) in probes[:3]:
        u1_field = lambda xx, zz, a, b: u1_eval(osc, xx, zz, a, b, quad)
        fwd = field_bracket(u1_field, osc.phi1, x, z, (t1, t2))
        rev = field_bracket(osc.phi1, u1_field, x, z, (t1, t2))
        worst = max(worst, float(np.max(np.abs(fwd + rev))))
    results.append(IdentityResult("bracket antisymmetry", worst, 1e-8))

    # quadrature average against the scenario's closed form
    worst = 0.0
    for (x, z, _, _) in probes:
        fb = f_bar_eval(osc, x, z, quad)
        ref = scn.analytic_average(x, z)
        worst = max(worst, float(np.max(np.abs(fb - ref))))
    results.append(IdentityResult("average field vs closed form", worst, 1e-6))
    return results
