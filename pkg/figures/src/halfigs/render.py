"""Render publication-style figures from hal trajectory CSV files.

The input format is the arc CSV written by ``hal run``: comment headers
prefixed with '#', a ``t,j,...`` column header, one row per sample, and jump
boundaries as consecutive rows sharing ``t`` with ``j`` incremented.

Four figure kinds are supported:

* ``vehicle``     planar path with a switching-signal step inset
* ``sync``        one phase trace per oscillator against time
* ``sphere-cost`` height-cost trace with the logic-mode steps below
* ``sphere-3d``   trajectory drawn on a wireframe unit sphere

Rendering is a pure function of the CSV content and the job options; golden
tests compare the extracted plotted arrays, not raster pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("vehicle", "sync", "sphere-cost", "sphere-3d")

FIGSIZE = (6.4, 4.8)
DPI = 110


class SchemaError(Exception):
    """Input CSV does not match the documented trajectory schema."""


@dataclass
class PlotJob:
    kind: str
    inputs: list[str]
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("plot job needs at least one input CSV")


@dataclass
class ArcTable:
    meta: dict
    columns: list[str]
    t: np.ndarray
    j: np.ndarray
    states: np.ndarray

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"CSV is missing required column {name!r}")
        return self.states[:, self.columns.index(name)]

    def state_columns(self) -> list[str]:
        """Names of the x_* block, in order, before any logic/timer columns."""
        return [c for c in self.columns if c.startswith("x_")]


def load_arc_csv(path) -> ArcTable:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    meta = {}
    header = None
    rows = []
    with open(path) as f:
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
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise SchemaError(f"non-numeric data row in {path}: {line!r}") from exc
    if header is None or header[:2] != ["t", "j"]:
        raise SchemaError(f"{path} lacks the 't,j,...' column header")
    if not rows:
        raise SchemaError(f"{path} holds no trajectory samples")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows against {len(header)} columns")
    return ArcTable(meta=meta, columns=header[2:], t=data[:, 0],
                    j=data[:, 1].astype(int), states=data[:, 2:])


# ---------------------------------------------------------------------------
# plotted-array extraction (the golden-test surface)
# ---------------------------------------------------------------------------

def extract_arrays(job: PlotJob) -> dict[str, np.ndarray]:
    """The exact data arrays the figure would draw, keyed by trace name."""
    tables = [load_arc_csv(p) for p in job.inputs]
    main = tables[0]
    out: dict[str, np.ndarray] = {}
    if job.kind == "vehicle":
        for k, tab in enumerate(tables):
            tag = f"path{k}" if len(tables) > 1 else "path"
            out[f"{tag}_x"] = tab.column("x_1")
            out[f"{tag}_y"] = tab.column("x_2")
            out[f"{tag}_mode_t"] = tab.t
            out[f"{tag}_mode"] = tab.column("z1")
    elif job.kind == "sync":
        names = main.state_columns()
        if not names:
            raise SchemaError("sync figure needs x_* phase columns")
        out["t"] = main.t
        for name in names:
            out[f"phase_{name}"] = main.column(name)
    elif job.kind == "sphere-cost":
        out["t"] = main.t
        out["cost"] = 1.0 - main.column("x_3")
        out["mode"] = main.column("z1")
    elif job.kind == "sphere-3d":
        for name in ("x_1", "x_2", "x_3"):
            out[name] = main.column(name)
    return out


# ---------------------------------------------------------------------------
# figure drawing
# ---------------------------------------------------------------------------

def _draw_vehicle(arrays, tables, ax_path, ax_mode):
    colors = ("tab:blue", "tab:red", "tab:green")
    multi = any(key.startswith("path0") for key in arrays)
    for k in range(len(tables)):
        tag = f"path{k}" if multi else "path"
        c = colors[k % len(colors)]
        ax_path.plot(arrays[f"{tag}_x"], arrays[f"{tag}_y"], color=c, lw=1.0)
        ax_path.plot(arrays[f"{tag}_x"][:1], arrays[f"{tag}_y"][:1], "o", color=c, ms=4)
        ax_mode.step(arrays[f"{tag}_mode_t"], arrays[f"{tag}_mode"],
                     where="post", color=c, lw=1.0)
    ax_path.axhline(0.0, color="0.8", lw=0.5)
    ax_path.axvline(0.0, color="0.8", lw=0.5)
    ax_path.set_xlabel("x1")
    ax_path.set_ylabel("x2")
    ax_path.set_title("planar trajectory")
    ax_mode.set_xlabel("t")
    ax_mode.set_ylabel("mode")
    ax_mode.set_yticks(sorted(set(int(v) for key in arrays if key.endswith("_mode")
                                  for v in arrays[key])))


def render(job: PlotJob, return_arrays: bool = False):
    """Draw the figure for a job; returns the output path (and optionally
    the plotted arrays)."""
    arrays = extract_arrays(job)
    tables = [load_arc_csv(p) for p in job.inputs]
    if job.kind == "vehicle":
        fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
        ax_path = fig.add_axes([0.10, 0.12, 0.85, 0.80])
        ax_mode = fig.add_axes([0.62, 0.16, 0.30, 0.22])  # bottom-right inset
        _draw_vehicle(arrays, tables, ax_path, ax_mode)
    elif job.kind == "sync":
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
        for key in sorted(k for k in arrays if k.startswith("phase_")):
            ax.plot(arrays["t"], arrays[key], lw=1.0, label=key.removeprefix("phase_"))
        ax.set_xlabel("t")
        ax.set_ylabel("phase")
        ax.set_title("oscillator phases")
        ax.legend(loc="upper left", fontsize=8)
    elif job.kind == "sphere-cost":
        fig, (ax_cost, ax_mode) = plt.subplots(
            2, 1, figsize=FIGSIZE, dpi=DPI, sharex=True,
            gridspec_kw={"height_ratios": [3, 1]})
        ax_cost.plot(arrays["t"], arrays["cost"], color="tab:blue", lw=1.0)
        ax_cost.set_ylabel("cost")
        ax_cost.set_title("height cost along the run")
        ax_mode.step(arrays["t"], arrays["mode"], where="post",
                     color="tab:orange", lw=1.0)
        ax_mode.set_xlabel("t")
        ax_mode.set_ylabel("mode")
    else:  # sphere-3d
        fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
        ax = fig.add_subplot(111, projection="3d")
        u = np.linspace(0.0, 2.0 * np.pi, 24)
        v = np.linspace(0.0, np.pi, 12)
        ax.plot_wireframe(np.outer(np.cos(u), np.sin(v)),
                          np.outer(np.sin(u), np.sin(v)),
                          np.outer(np.ones_like(u), np.cos(v)),
                          color="0.85", linewidth=0.4)
        ax.plot(arrays["x_1"], arrays["x_2"], arrays["x_3"],
                color="tab:blue", lw=1.2)
        ax.scatter([0.0], [0.0], [1.0], color="tab:green", s=25)
        ax.set_box_aspect((1, 1, 1))
        ax.set_title("trajectory on the unit sphere")
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    if return_arrays:
        return out, arrays
    return out
