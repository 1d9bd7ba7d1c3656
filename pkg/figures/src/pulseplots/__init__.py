"""Figure rendering for eopulse run directories."""

from .render import KINDS, FigureSpec, build_figure, render
from .schemas import SchemaError

__version__ = "0.1.0"
