"""Figure regeneration for entropydg run outputs."""

from .render import FigureSpec, KINDS, fit_slope, render
from .schemas import SCHEMAS, SchemaError, load_table

__version__ = "0.1.0"
