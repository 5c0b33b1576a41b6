from .io import SchemaError
from .render import KINDS, FigureSpec, render, render_to_file

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureSpec", "SchemaError", "render", "render_to_file"]
