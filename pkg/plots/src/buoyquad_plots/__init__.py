"""Figure rendering for buoyquad trace and campaign summary CSVs."""

__version__ = "0.1.0"

from .render import KINDS, PlotError, PlotSpec, render

__all__ = ["KINDS", "PlotError", "PlotSpec", "render", "__version__"]
