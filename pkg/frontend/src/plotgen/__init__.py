"""Figure generation for group-testing sweep CSVs."""

from .render import (
    KNOWN_COLUMNS,
    MissingColumnError,
    PlotGenError,
    PlotSpec,
    REQUIRED_COLUMNS,
    group_series,
    load_rows,
    render,
)

__all__ = [
    "KNOWN_COLUMNS",
    "REQUIRED_COLUMNS",
    "PlotGenError",
    "MissingColumnError",
    "PlotSpec",
    "group_series",
    "load_rows",
    "render",
]

__version__ = "0.1.0"
