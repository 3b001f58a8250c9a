"""Hybrid time domains and sampled hybrid arcs.

An arc is stored as an ordered list of per-jump segments.  Segment ``j`` holds
a strictly increasing time grid and one state sample per grid point; segment
``j+1`` starts at the time where segment ``j`` ends, so a jump shows up as two
samples sharing the same ``t`` with ``j`` differing by one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HalError

_TIME_ATOL = 1e-9


@dataclass(frozen=True)
class HybridTimePoint:
    """A point (t, j) of a hybrid time domain, ordered by t + j."""

    t: float
    j: int

    def __post_init__(self):
        if self.t < 0 or self.j < 0:
            raise HalError(f"hybrid time point must have t >= 0, j >= 0, got {self}")

    @property
    def total(self) -> float:
        return self.t + self.j

    def __le__(self, other: "HybridTimePoint") -> bool:
        return self.total <= other.total

    def __lt__(self, other: "HybridTimePoint") -> bool:
        return self.total < other.total


@dataclass
class ArcSegment:
    """Samples of one flow interval: jump index, time grid, states (m, n)."""

    j: int
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.times.ndim != 1 or len(self.times) == 0:
            raise HalError("segment needs a nonempty 1-d time grid")
        if self.states.shape[0] != len(self.times):
            raise HalError(
                f"segment j={self.j}: {len(self.times)} times vs "
                f"{self.states.shape[0]} state rows"
            )
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise HalError(f"segment j={self.j}: time grid not strictly increasing")

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def interp(self, t: float) -> np.ndarray:
        """Piecewise-linear state at time t (t clamped to the grid range)."""
        t = min(max(t, self.times[0]), self.times[-1])
        out = np.empty(self.states.shape[1])
        for k in range(self.states.shape[1]):
            out[k] = np.interp(t, self.times, self.states[:, k])
        return out


class HybridArc:
    """A sampled hybrid arc: consecutive segments with j incremented by one.

    ``columns`` optionally names the state components (used by the CSV
    serialization); ``meta`` holds header key/values such as scenario name,
    epsilon and seed.
    """

    def __init__(self, segments, columns=None, meta=None, check=True):
        self.segments: list[ArcSegment] = list(segments)
        self.columns = tuple(columns) if columns is not None else None
        self.meta = dict(meta) if meta else {}
        if check:
            self._validate()

    def _validate(self):
        if not self.segments:
            return
        n = self.segments[0].states.shape[1]
        if abs(self.segments[0].t_start) > _TIME_ATOL:
            raise HalError("segment 0 must start at t = 0")
        prev = None
        for seg in self.segments:
            if seg.states.shape[1] != n:
                raise HalError("state dimension differs between segments")
            if prev is not None:
                if seg.j != prev.j + 1:
                    raise HalError(
                        f"segment jump indices must increase by 1 (got {prev.j} -> {seg.j})"
                    )
                if abs(seg.t_start - prev.t_end) > _TIME_ATOL:
                    raise HalError(
                        f"segment j={seg.j} starts at {seg.t_start}, previous ended "
                        f"at {prev.t_end}"
                    )
            prev = seg
        if self.columns is not None and len(self.columns) != n:
            raise HalError("column names must match the state dimension")

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        if not self.segments:
            return 0
        return self.segments[0].states.shape[1]

    @property
    def num_jumps(self) -> int:
        return self.segments[-1].j if self.segments else 0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end if self.segments else 0.0

    @property
    def sample_count(self) -> int:
        return sum(len(s.times) for s in self.segments)

    def segment(self, j: int) -> ArcSegment | None:
        for seg in self.segments:
            if seg.j == j:
                return seg
        return None

    def first_state(self) -> np.ndarray:
        return self.segments[0].states[0].copy()

    def last_state(self) -> np.ndarray:
        return self.segments[-1].states[-1].copy()

    def samples(self):
        """Yield (t, j, state) over all samples in order."""
        for seg in self.segments:
            for t, x in zip(seg.times, seg.states):
                yield float(t), seg.j, x

    def value(self, t: float, j: int) -> np.ndarray:
        seg = self.segment(j)
        if seg is None:
            raise HalError(f"arc has no segment j={j}")
        return seg.interp(t)

    # -- transforms ----------------------------------------------------

    def select(self, indices) -> "HybridArc":
        """Project every sample onto the given state components.

        ``indices`` may be integer positions or column names.
        """
        if self.columns is not None and indices and isinstance(indices[0], str):
            pos = [self.columns.index(name) for name in indices]
        else:
            pos = list(indices)
        cols = tuple(self.columns[p] for p in pos) if self.columns else None
        segs = [ArcSegment(s.j, s.times.copy(), s.states[:, pos].copy()) for s in self.segments]
        return HybridArc(segs, columns=cols, meta=self.meta)

    def restrict(self, T: float) -> "HybridArc":
        """Restriction to hybrid times with t + j <= T (boundary included)."""
        return hybrid_time_slice(self, T)

    # -- serialization -------------------------------------------------

    def to_csv(self, path_or_buf) -> None:
        write_arc_csv(self, path_or_buf)

    @classmethod
    def from_csv(cls, path_or_buf) -> "HybridArc":
        return read_arc_csv(path_or_buf)


def hybrid_time_slice(arc: HybridArc, T: float) -> HybridArc:
    """Restrict an arc to sample points with t + j <= T.

    Keeps existing grid points only (no boundary interpolation); an empty
    result is returned as an arc with no segments.
    """
    if T < 0:
        raise HalError("slice horizon must be nonnegative")
    segs = []
    for seg in arc.segments:
        budget = T - seg.j + _TIME_ATOL
        keep = seg.times <= budget
        if not np.any(keep):
            break
        segs.append(ArcSegment(seg.j, seg.times[keep].copy(), seg.states[keep].copy()))
        if not np.all(keep):
            break
    return HybridArc(segs, columns=arc.columns, meta=arc.meta)


def write_arc_csv(arc: HybridArc, path_or_buf) -> None:
    """Serialize an arc: '#' header lines, then t, j and state columns."""
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    f = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        for key, val in arc.meta.items():
            f.write(f"# {key}={val}\n")
        names = arc.columns or tuple(f"x_{k+1}" for k in range(arc.n))
        f.write("t,j," + ",".join(names) + "\n")
        for t, j, x in arc.samples():
            f.write(f"{t!r},{j}," + ",".join(repr(float(v)) for v in x) + "\n")
    finally:
        if own:
            f.close()


def read_arc_csv(path_or_buf) -> HybridArc:
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    f = open(path_or_buf, "r", newline="") if own else path_or_buf
    try:
        meta = {}
        header = None
        rows = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    meta[key.strip()] = val.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(v) for v in line.split(",")])
    finally:
        if own:
            f.close()
    if header is None or not rows:
        raise HalError("arc CSV holds no samples")
    data = np.asarray(rows)
    t, j, states = data[:, 0], data[:, 1].astype(int), data[:, 2:]
    columns = tuple(header[2:])
    segs = []
    start = 0
    for k in range(1, len(t) + 1):
        if k == len(t) or j[k] != j[start]:
            segs.append(ArcSegment(int(j[start]), t[start:k].copy(), states[start:k].copy()))
            start = k
    return HybridArc(segs, columns=columns, meta=meta)


def arc_from_dense(times, states, j: int = 0, columns=None, meta=None) -> HybridArc:
    """Single-segment arc from dense (times, states) arrays."""
    return HybridArc([ArcSegment(j, np.asarray(times, float), np.asarray(states, float))],
                     columns=columns, meta=meta)
