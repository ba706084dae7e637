"""Batch renderer for supcar-lab CSV outputs.

Strictly a renderer: every number plotted comes from a CSV produced by
the numerical toolkit; nothing is recomputed here.
"""

from .render import PlotJob, render

__version__ = "0.1.0"

__all__ = ["PlotJob", "render", "__version__"]
