"""Figure rendering for zmap-lab sweep artifacts.

Consumes the CSV files the sweep CLI writes; computes no physics of
its own.
"""

from .errors import PlotError, SchemaMismatch
from .figures import FigureSpec, render, render_figure
from .reader import KIND_COLUMNS, Table, read_table

__all__ = [
    "PlotError",
    "SchemaMismatch",
    "FigureSpec",
    "render",
    "render_figure",
    "KIND_COLUMNS",
    "Table",
    "read_table",
]
