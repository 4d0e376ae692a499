"""Grouped-bar figure rendering for simulator result CSVs."""

from .figures import (
    CSV_HEADER,
    FIGURE_KINDS,
    EmptyDataError,
    PlotSpec,
    SchemaError,
    load_rows,
    render,
)

__version__ = "0.1.0"

__all__ = ["CSV_HEADER", "FIGURE_KINDS", "EmptyDataError", "PlotSpec",
           "SchemaError", "load_rows", "render"]
