"""Static-figure renderer for the simulation toolkit's curve CSVs."""

from .render import (
    FigureSpec,
    RenderResult,
    SchemaError,
    fit_loglog_slope,
    read_curve,
    render,
)

__version__ = "0.1.0"
