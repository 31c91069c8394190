"""Figure rendering and log-log slope reports for wcsim sweep CSVs.

This package talks to the simulator only through its CSV schema, so it can
be installed and versioned independently.
"""

from wcsim_plot.figures import FigureSpec, fit_loglog_slope, render_figure

__all__ = ["FigureSpec", "fit_loglog_slope", "render_figure"]

__version__ = "0.1.0"
