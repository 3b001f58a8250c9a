"""halfigs: figure rendering for hal trajectory CSV outputs."""

from .render import ArcTable, PlotJob, SchemaError, extract_arrays, load_arc_csv, render

__version__ = "0.1.0"
