"""Figure rendering for fracsim CSV outputs."""

from .errors import HeaderMismatchError, PlotError
from .render import KINDS, PlotSpec, render

__version__ = "0.1.0"

__all__ = [
    "HeaderMismatchError",
    "KINDS",
    "PlotError",
    "PlotSpec",
    "render",
    "__version__",
]
