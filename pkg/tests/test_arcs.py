import io

import numpy as np
import pytest

from hal.arcs import (ArcSegment, HybridArc, HybridTimePoint, arc_from_dense,
                      hybrid_time_slice)
from hal.errors import HalError


def make_two_jump_arc():
    """Flow on [0,1], jump, flow on [1,2], jump, flow on [2,3]."""
    t0 = np.linspace(0.0, 1.0, 11)
    t1 = np.linspace(1.0, 2.0, 11)
    t2 = np.linspace(2.0, 3.0, 11)
    segs = [
        ArcSegment(0, t0, np.stack([t0, -t0], axis=1)),
        ArcSegment(1, t1, np.stack([t1 + 1.0, -t1], axis=1)),
        ArcSegment(2, t2, np.stack([t2 + 2.0, -t2], axis=1)),
    ]
    return HybridArc(segs, columns=("a", "b"), meta={"scenario": "toy"})


def test_time_point_ordering_uses_total_time():
    assert HybridTimePoint(1.0, 2) <= HybridTimePoint(2.0, 1)
    assert HybridTimePoint(0.5, 0) < HybridTimePoint(1.0, 0)
    assert not HybridTimePoint(3.0, 1) < HybridTimePoint(1.0, 1)
    with pytest.raises(HalError):
        HybridTimePoint(-0.1, 0)


def test_arc_invariants_enforced():
    t = np.linspace(0.0, 1.0, 5)
    x = np.zeros((5, 2))
    with pytest.raises(HalError):  # segment 0 must start at zero
        HybridArc([ArcSegment(0, t + 0.5, x)])
    with pytest.raises(HalError):  # jump index gap
        HybridArc([ArcSegment(0, t, x), ArcSegment(2, t + 1.0, x)])
    with pytest.raises(HalError):  # time mismatch at the boundary
        HybridArc([ArcSegment(0, t, x), ArcSegment(1, t + 2.0, x)])
    with pytest.raises(HalError):  # non-increasing grid
        ArcSegment(0, np.array([0.0, 0.5, 0.5]), np.zeros((3, 1)))


def test_slice_no_jumps_keeps_prefix():
    t = np.linspace(0.0, 10.0, 101)
    arc = arc_from_dense(t, np.stack([np.sin(t)], axis=1))
    cut = hybrid_time_slice(arc, 5.0)
    assert len(cut.segments) == 1
    assert cut.segments[0].t_end == pytest.approx(5.0)


def test_slice_keeps_boundary_point_of_later_segment():
    # jumps at t = 1 and t = 2; horizon 2 keeps j=1 only at its first instant
    arc = make_two_jump_arc()
    cut = hybrid_time_slice(arc, 2.0)
    assert [s.j for s in cut.segments] == [0, 1]
    assert cut.segments[0].t_end == pytest.approx(1.0)
    assert cut.segments[1].times.tolist() == [1.0]


def test_slice_zero_horizon_single_point():
    arc = make_two_jump_arc()
    cut = hybrid_time_slice(arc, 0.0)
    assert len(cut.segments) == 1
    assert cut.segments[0].times.tolist() == [0.0]
    empty = hybrid_time_slice(make_two_jump_arc().select([0]), 0.0)
    assert empty.n == 1


def test_select_by_name_and_index():
    arc = make_two_jump_arc()
    by_name = arc.select(["b"])
    by_idx = arc.select([1])
    assert by_name.columns == ("b",)
    np.testing.assert_array_equal(by_name.segments[0].states,
                                  by_idx.segments[0].states)


def test_csv_round_trip_preserves_samples_and_meta():
    arc = make_two_jump_arc()
    buf = io.StringIO()
    arc.to_csv(buf)
    text = buf.getvalue()
    assert text.startswith("# scenario=toy\n")
    assert "t,j,a,b" in text
    back = HybridArc.from_csv(io.StringIO(text))
    assert back.meta["scenario"] == "toy"
    assert back.num_jumps == 2
    for sa, sb in zip(arc.segments, back.segments):
        np.testing.assert_array_equal(sa.times, sb.times)
        np.testing.assert_array_equal(sa.states, sb.states)


def test_csv_jump_boundary_rows_share_time():
    arc = make_two_jump_arc()
    buf = io.StringIO()
    arc.to_csv(buf)
    rows = [line.split(",") for line in buf.getvalue().splitlines()
            if line and not line.startswith(("#", "t,"))]
    pairs = [(float(r[0]), int(r[1])) for r in rows]
    boundaries = [(a, b) for a, b in zip(pairs, pairs[1:]) if b[1] == a[1] + 1]
    assert len(boundaries) == 2
    for (t_pre, _), (t_post, _) in boundaries:
        assert t_pre == t_post


def test_value_interpolates_inside_segment():
    t = np.linspace(0.0, 1.0, 3)
    arc = arc_from_dense(t, np.stack([2.0 * t], axis=1))
    assert arc.value(0.25, 0)[0] == pytest.approx(0.5)
