from .io import ParseError, read_convergence, read_field, read_spectrum, read_vectorfield
from .render import KINDS, FigureJob, render

__all__ = [
    "FigureJob",
    "KINDS",
    "ParseError",
    "read_convergence",
    "read_field",
    "read_spectrum",
    "read_vectorfield",
    "render",
]
