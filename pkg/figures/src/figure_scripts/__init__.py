"""Figure rendering for cascade experiment CSV files."""

__version__ = "0.1.0"

from .plots import PlotSpec, group_rows, load_rows, render

__all__ = ["PlotSpec", "group_rows", "load_rows", "render", "__version__"]
