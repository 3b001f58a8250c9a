import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hal.arcs import ArcSegment, HybridArc, arc_from_dense
from hal.closeness import (IndicatorSpec, is_T_rho_close, min_rho,
                           practical_stability_check)
from hal.errors import DimensionMismatch, HalError


def linear_arc(slope=2.0, shift=0.0, T=10.0, n=501):
    t = np.linspace(0.0, T, n)
    return arc_from_dense(t, (slope * (t - shift))[:, None])


def test_arc_close_to_itself_at_zero_rho():
    arc = linear_arc()
    assert is_T_rho_close(arc, arc, T=10.0, rho=0.0)


def test_time_shifted_arc_thresholds():
    # slope-2 ramps shifted by 0.1: distance at best time match is
    # 0.2 - 2 rho, so rho = 0.2 works and rho = 0.05 cannot
    a = linear_arc(shift=0.0)
    b = linear_arc(shift=0.1)
    assert is_T_rho_close(a, b, T=10.0, rho=0.2)
    assert not is_T_rho_close(a, b, T=10.0, rho=0.05)


def test_jump_count_mismatch_is_never_close():
    t = np.linspace(0.0, 2.0, 21)
    flat = arc_from_dense(t, np.zeros((21, 1)))
    half = np.linspace(0.0, 1.0, 11)
    jumpy = HybridArc([
        ArcSegment(0, half, np.zeros((11, 1))),
        ArcSegment(1, half + 1.0, np.ones((11, 1))),
    ])
    for rho in (0.1, 1.0, 5.0):
        assert not is_T_rho_close(flat, jumpy, T=2.0, rho=rho)
        assert not is_T_rho_close(jumpy, flat, T=2.0, rho=rho)


def test_dimension_mismatch_raises():
    a = linear_arc()
    t = np.linspace(0.0, 10.0, 11)
    b = arc_from_dense(t, np.zeros((11, 2)))
    with pytest.raises(DimensionMismatch):
        is_T_rho_close(a, b, T=1.0, rho=1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.0, max_value=0.3),
       st.floats(min_value=0.0, max_value=0.3))
def test_closeness_monotone_in_rho(rho_small, rho_big):
    rho_small, rho_big = min(rho_small, rho_big), max(rho_small, rho_big)
    a = linear_arc(shift=0.0, T=4.0, n=101)
    b = linear_arc(shift=0.07, T=4.0, n=101)
    if is_T_rho_close(a, b, T=4.0, rho=rho_small):
        assert is_T_rho_close(a, b, T=4.0, rho=rho_big)


def test_min_rho_identical_arcs():
    arc = linear_arc()
    report = min_rho(arc, arc, T=10.0, tol=1e-3)
    assert report.rho_min <= 1e-3


def test_min_rho_constant_arcs_at_distance():
    t = np.linspace(0.0, 5.0, 51)
    a = arc_from_dense(t, np.zeros((51, 2)))
    b = arc_from_dense(t, np.tile([0.7, 0.0], (51, 1)))
    report = min_rho(a, b, T=5.0, tol=1e-3)
    assert report.rho_min == pytest.approx(0.7, abs=2e-3)
    assert report.witness is not None
    assert report.witness[2] <= 0.7 + 1e-6


def test_min_rho_symmetric():
    a = linear_arc(shift=0.0, T=6.0)
    b = linear_arc(shift=0.13, T=6.0)
    r_ab = min_rho(a, b, T=6.0, tol=1e-4).rho_min
    r_ba = min_rho(b, a, T=6.0, tol=1e-4).rho_min
    assert abs(r_ab - r_ba) <= 2e-4


def test_min_rho_unreachable_structures_raise():
    t = np.linspace(0.0, 2.0, 21)
    flat = arc_from_dense(t, np.zeros((21, 1)))
    half = np.linspace(0.0, 1.0, 11)
    jumpy = HybridArc([
        ArcSegment(0, half, np.zeros((11, 1))),
        ArcSegment(1, half + 1.0, np.ones((11, 1))),
    ])
    with pytest.raises(HalError):
        min_rho(flat, jumpy, T=2.0, tol=1e-3)


def test_exponential_decay_settles_at_log_ratio():
    t = np.linspace(0.0, 8.0, 4001)
    arc = arc_from_dense(t, np.exp(-t)[:, None])
    ind = IndicatorSpec(points=np.zeros((1, 1)))
    verdict = practical_stability_check(arc, ind, nu=0.1, c_overshoot=2.0,
                                        horizon=8.0)
    assert verdict.passed
    assert verdict.settle_time == pytest.approx(np.log(10.0), abs=0.01)
    assert verdict.overshoot_ratio == pytest.approx(1.0)


def test_constant_arc_fails_practical_stability():
    t = np.linspace(0.0, 5.0, 51)
    arc = arc_from_dense(t, np.ones((51, 1)))
    ind = IndicatorSpec(points=np.zeros((1, 1)))
    verdict = practical_stability_check(arc, ind, nu=0.5, c_overshoot=2.0,
                                        horizon=5.0)
    assert not verdict.passed
    assert not np.isfinite(verdict.settle_time)


def test_indicator_forms():
    ind_pts = IndicatorSpec(points=np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert ind_pts(np.array([1.0, 0.0])) == 0.0
    assert ind_pts(np.array([0.0, 0.0])) == pytest.approx(1.0)

    ind_call = IndicatorSpec(distance=lambda x: float(np.abs(x[0])),
                             components=(1,))
    assert ind_call(np.array([9.0, -2.0])) == pytest.approx(2.0)

    ind_prod = IndicatorSpec(point=np.array([0.0]),
                             box=(np.array([-1.0]), np.array([1.0])))
    assert ind_prod(np.array([0.0, 0.5])) == 0.0
    assert ind_prod(np.array([3.0, 2.0])) == pytest.approx(np.hypot(3.0, 1.0))
    assert ind_prod.check_zero_on([np.array([0.0, -1.0]), np.array([0.0, 1.0])])

    with pytest.raises(HalError):
        IndicatorSpec()
    with pytest.raises(HalError):
        IndicatorSpec(points=np.zeros((1, 1)), distance=lambda x: 0.0)
