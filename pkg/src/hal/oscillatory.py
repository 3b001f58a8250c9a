"""Two-timescale oscillatory flow structure with fast timers.

A flow of this family has the form ``eps**-1 * phi1 + phi2`` where ``phi1``
and ``phi2`` are periodic in the two timer states.  The timers advance at
rates 1/eps and 1/eps**2 and are frozen across jumps.  ``phi1`` must have
zero mean in the fast timer over one period for the second-order average to
be meaningful; :func:`verify_regularity` measures how well a given spec
satisfies the periodicity and zero-mean requirements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional

import numpy as np

from .errors import NonpositiveEpsilon

FieldFn = Callable[..., np.ndarray]


@dataclass
class OscillatoryFlowSpec:
    """Data (phi1, phi2, T1, T2) of an oscillatory flow on an n1-dim block.

    ``phi1`` and ``phi2`` take ``(x, z, tau1, tau2)`` and return a length-n1
    vector; they should broadcast over a 1-d ``tau2`` array (returning shape
    ``(len(tau2), n1)``) for fast quadrature, but a scalar-only callable also
    works.  ``jac_phi1_x`` optionally supplies the analytic Jacobian of
    ``phi1`` in ``x`` with the same calling convention.
    """

    n1: int
    phi1: FieldFn
    phi2: FieldFn
    T1: float
    T2: float
    jac_phi1_x: Optional[FieldFn] = None

    def __post_init__(self):
        if self.T1 <= 0 or self.T2 <= 0:
            raise ValueError("periods T1, T2 must be positive")
        if self.n1 <= 0:
            raise ValueError("n1 must be a positive integer")


@dataclass
class TimerState:
    """Fast timer pair; flows at (1/eps, 1/eps**2), unchanged at jumps."""

    tau1: float = 0.0
    tau2: float = 0.0

    def rates(self, eps: float) -> tuple[float, float]:
        if eps <= 0:
            raise NonpositiveEpsilon(f"eps must be positive, got {eps}")
        return 1.0 / eps, 1.0 / eps**2


@dataclass
class RegularityReport:
    periodicity_residual_1: float
    periodicity_residual_2: float
    zero_mean_residual: float

    def max_residual(self) -> float:
        return max(self.periodicity_residual_1, self.periodicity_residual_2,
                   self.zero_mean_residual)


class AssembledFlow:
    """Callable flow field eps**-1 * phi1 + phi2 with timer bookkeeping."""

    def __init__(self, spec: OscillatoryFlowSpec, eps: float):
        if eps <= 0:
            raise NonpositiveEpsilon(f"eps must be positive, got {eps}")
        self.spec = spec
        self.eps = eps

    def __call__(self, x, z, tau1, tau2):
        s = self.spec
        return np.asarray(s.phi1(x, z, tau1, tau2)) / self.eps + np.asarray(
            s.phi2(x, z, tau1, tau2))

    @property
    def timer_rates(self) -> tuple[float, float]:
        return 1.0 / self.eps, 1.0 / self.eps**2

    def extended(self, x, z, tau1, tau2) -> np.ndarray:
        """Velocity of the (x, tau1, tau2) block stacked as one vector."""
        r1, r2 = self.timer_rates
        return np.concatenate([self(x, z, tau1, tau2), [r1, r2]])


def assemble_f_eps(spec: OscillatoryFlowSpec, eps: float) -> AssembledFlow:
    """Bind an oscillatory spec to a concrete timescale parameter."""
    return AssembledFlow(spec, eps)


def eval_on_tau2_grid(fn: FieldFn, x, z, tau1: float, tau2_grid: np.ndarray,
                      n1: int) -> np.ndarray:
    """Evaluate a field on a tau2 grid, shape (m, n1); falls back to a loop."""
    tau2_grid = np.asarray(tau2_grid, dtype=float)
    m = len(tau2_grid)
    try:
        out = np.asarray(fn(x, z, tau1, tau2_grid), dtype=float)
        if out.shape == (m, n1):
            return out
    except Exception:
        pass
    return np.stack([np.asarray(fn(x, z, tau1, t2), dtype=float) for t2 in tau2_grid])


def trapezoid_period(values: np.ndarray, period: float) -> np.ndarray:
    """Composite trapezoid of samples on a uniform grid spanning one period.

    ``values`` holds both endpoints (shape (N+1, ...)); for periodic smooth
    integrands this rule is spectrally accurate.
    """
    n = values.shape[0] - 1
    h = period / n
    return h * (values[1:-1].sum(axis=0) + 0.5 * (values[0] + values[-1]))


def verify_regularity(spec: OscillatoryFlowSpec, samples, quad_nodes: int = 256
                      ) -> RegularityReport:
    """Measure periodicity of phi1/phi2 and the zero tau2-mean of phi1.

    ``samples`` is an iterable of (x, z, tau1, tau2) probe points; the
    zero-mean integral uses a composite trapezoid with ``quad_nodes`` uniform
    intervals per period.
    """
    if quad_nodes < 16:
        raise ValueError("quad_nodes must be at least 16")
    res1 = 0.0
    res2 = 0.0
    res0 = 0.0
    grid = np.linspace(0.0, spec.T2, quad_nodes + 1)
    for (x, z, tau1, tau2) in samples:
        for fn in (spec.phi1, spec.phi2):
            base = np.asarray(fn(x, z, tau1, tau2), dtype=float)
            res1 = max(res1, float(np.max(np.abs(
                np.asarray(fn(x, z, tau1 + spec.T1, tau2)) - base))))
            res2 = max(res2, float(np.max(np.abs(
                np.asarray(fn(x, z, tau1, tau2 + spec.T2)) - base))))
        vals = eval_on_tau2_grid(spec.phi1, x, z, tau1, grid, spec.n1)
        res0 = max(res0, float(np.max(np.abs(trapezoid_period(vals, spec.T2)))))
    return RegularityReport(res1, res2, res0)


def common_period(frequencies) -> float:
    """Least common period 2*pi*lcm(dens)/gcd(nums) of rational frequencies.

    Accepts Fractions, (num, den) pairs, or integers.  Exact rational inputs
    keep the returned period an exact common period of every cos(w_i * tau2).
    """
    fracs = []
    for w in frequencies:
        if isinstance(w, Fraction):
            fracs.append(w)
        elif isinstance(w, (tuple, list)) and len(w) == 2:
            fracs.append(Fraction(int(w[0]), int(w[1])))
        else:
            fracs.append(Fraction(w))
    if any(f <= 0 for f in fracs):
        raise ValueError("frequencies must be positive rationals")
    den_lcm = 1
    for f in fracs:
        den_lcm = den_lcm * f.denominator // gcd(den_lcm, f.denominator)
    num_gcd = 0
    for f in fracs:
        num_gcd = gcd(num_gcd, f.numerator)
    return 2.0 * np.pi * den_lcm / num_gcd
