"""The cross construction and its phase transition."""

from .complex import CrossComplex
from .model import CrossModel, build_cross, classify, type_counts
from .transition import transition_bounds

__all__ = [
    "CrossComplex",
    "CrossModel",
    "build_cross",
    "classify",
    "transition_bounds",
    "type_counts",
]
