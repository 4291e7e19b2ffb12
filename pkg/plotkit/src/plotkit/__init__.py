"""Figure rendering for dualgraph experiment CSVs.

Consumes only the documented CSV schemas of the dualgraph CLI; never
recomputes statistics.
"""

from .jobs import KINDS, PlotJob, SchemaError
from .render import RenderReport, render

__version__ = "0.1.0"

__all__ = ["KINDS", "PlotJob", "RenderReport", "SchemaError", "render"]
