"""Log-log figure rendering for vpaw1d benchmark CSV output."""

from .render import EmptyGroup, FigureSpec, MissingColumn, fit_loglog, render

__all__ = ["EmptyGroup", "FigureSpec", "MissingColumn", "fit_loglog", "render"]

__version__ = "0.1.0"
