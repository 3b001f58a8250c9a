from fractions import Fraction

import numpy as np
import pytest

from hal.errors import NonpositiveEpsilon
from hal.oscillatory import (OscillatoryFlowSpec, assemble_f_eps,
                             common_period, verify_regularity)

TWO_PI = 2.0 * np.pi


def constant_spec(c):
    c = np.asarray(c, dtype=float)
    return OscillatoryFlowSpec(
        n1=len(c),
        phi1=lambda x, z, t1, t2: c if np.ndim(t2) == 0
        else np.tile(c, (len(np.atleast_1d(t2)), 1)),
        phi2=lambda x, z, t1, t2: np.zeros_like(c) if np.ndim(t2) == 0
        else np.zeros((len(np.atleast_1d(t2)), len(c))),
        T1=TWO_PI, T2=TWO_PI)


def test_assemble_zero_dominant_term_gives_drift():
    g = np.array([0.3, -0.2])
    spec = OscillatoryFlowSpec(
        n1=2,
        phi1=lambda x, z, t1, t2: np.zeros(2),
        phi2=lambda x, z, t1, t2: g,
        T1=TWO_PI, T2=TWO_PI)
    for eps in (1.0, 0.1, 0.003):
        field = assemble_f_eps(spec, eps)
        np.testing.assert_allclose(field(np.zeros(2), 0.0, 0.1, 0.2), g)


def test_assemble_scales_dominant_term_linearly():
    c = np.array([1.0, -2.0])
    field = assemble_f_eps(constant_spec(c), 0.5)
    np.testing.assert_allclose(field(np.zeros(2), 0.0, 0.0, 0.0), 2.0 * c)
    assert field.timer_rates == (2.0, 4.0)
    ext = field.extended(np.zeros(2), 0.0, 0.0, 0.0)
    np.testing.assert_allclose(ext, [2.0, -4.0, 2.0, 4.0])


def test_assemble_rejects_nonpositive_epsilon():
    with pytest.raises(NonpositiveEpsilon):
        assemble_f_eps(constant_spec([1.0]), 0.0)


def test_assemble_homogeneous_in_dominant_term():
    c = np.array([0.7, 0.4])
    single = assemble_f_eps(constant_spec(c), 0.2)
    double = assemble_f_eps(constant_spec(2.0 * c), 0.2)
    args = (np.zeros(2), 0.0, 0.3, 1.1)
    np.testing.assert_allclose(double(*args), 2.0 * single(*args), atol=1e-14)


def test_vehicle_field_matches_hand_coded_law(vehicle, rng):
    # independent evaluation of the rotating-frame feedback law
    scn, _ = vehicle
    field = assemble_f_eps(scn.osc, scn.eps)
    for _ in range(20):
        x = np.concatenate([rng.uniform(-3, 3, 2), [np.cos(0.9), np.sin(0.9)]])
        z1 = float(rng.integers(1, 4))
        t1, t2 = rng.uniform(0, TWO_PI, 2)
        J = 0.5 * (x[0]**2 + x[1]**2)
        c = (z1 - 2.0) * J
        h = np.array([np.cos(t1) * x[2] + np.sin(t1) * x[3],
                      -np.sin(t1) * x[2] + np.cos(t1) * x[3]])
        expected = np.zeros(4)
        expected[:2] = np.sqrt(2.0) / scn.eps * h * np.cos(t2 + c)
        np.testing.assert_allclose(field(x, z1, t1, t2), expected, atol=1e-12)


def test_vehicle_regularity_residuals(vehicle, rng):
    scn, _ = vehicle
    samples = []
    for _ in range(100):
        x = np.concatenate([rng.uniform(-3, 3, 2),
                            [np.cos(rng.uniform(0, TWO_PI))] * 2])
        x[3] = np.sqrt(max(0.0, 1 - x[2]**2))
        samples.append((x, float(rng.integers(1, 4)),
                        rng.uniform(0, TWO_PI), rng.uniform(0, TWO_PI)))
    report = verify_regularity(scn.osc, samples, quad_nodes=256)
    assert report.max_residual() <= 1e-10


def test_constant_offset_breaks_zero_mean():
    # phi1 = cos(t2) + 0.1: the period integral is 0.1 * T2
    spec = OscillatoryFlowSpec(
        n1=1,
        phi1=lambda x, z, t1, t2: np.atleast_1d(np.cos(t2) + 0.1)
        if np.ndim(t2) == 0 else (np.cos(t2) + 0.1)[:, None],
        phi2=lambda x, z, t1, t2: np.zeros(1) if np.ndim(t2) == 0
        else np.zeros((len(t2), 1)),
        T1=TWO_PI, T2=TWO_PI)
    report = verify_regularity(spec, [(np.zeros(1), 0.0, 0.0, 0.0)], 256)
    assert report.zero_mean_residual == pytest.approx(0.1 * TWO_PI, abs=1e-10)


def test_tau1_independent_spec_has_zero_tau1_residual():
    spec = OscillatoryFlowSpec(
        n1=1,
        phi1=lambda x, z, t1, t2: np.atleast_1d(np.cos(t2)),
        phi2=lambda x, z, t1, t2: np.zeros(1),
        T1=TWO_PI, T2=TWO_PI)
    report = verify_regularity(spec, [(np.zeros(1), 0.0, 1.3, 0.7)], 64)
    assert report.periodicity_residual_1 == 0.0


def test_verify_regularity_rejects_sparse_quadrature(vehicle):
    scn, _ = vehicle
    with pytest.raises(ValueError):
        verify_regularity(scn.osc, [], quad_nodes=8)


@pytest.mark.parametrize("freqs,expected", [
    ((1,), TWO_PI),
    ((3, 2, 1), TWO_PI),
    ((Fraction(1), Fraction(3, 2), Fraction(7, 4)), 8.0 * np.pi),
    (((2, 3), (1, 2)), 12.0 * np.pi),
])
def test_common_period_of_rationals(freqs, expected):
    T = common_period(freqs)
    assert T == pytest.approx(expected, rel=1e-12)
    for w in freqs:
        f = Fraction(int(w[0]), int(w[1])) if isinstance(w, tuple) else Fraction(w)
        cycles = float(f) * T / TWO_PI
        assert cycles == pytest.approx(round(cycles), abs=1e-9)


def test_common_period_rejects_nonpositive():
    with pytest.raises(ValueError):
        common_period((1, 0))
