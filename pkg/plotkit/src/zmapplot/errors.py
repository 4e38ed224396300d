"""Error types raised by the figure pipeline."""

__all__ = ["PlotError", "SchemaMismatch"]


class PlotError(Exception):
    """Base class for everything zmap-plot raises on purpose."""


class SchemaMismatch(PlotError):
    """The input CSV does not carry the column set of the declared kind."""
