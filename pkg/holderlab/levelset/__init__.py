"""Level-set fronts and measures over hierarchical cell complexes."""

from .complex import CellComplex, TriangleComplex
from .engine import LevelQuery, build_front, build_measure, descend
from .fields import VertexField

__all__ = [
    "CellComplex",
    "TriangleComplex",
    "LevelQuery",
    "VertexField",
    "build_front",
    "build_measure",
    "descend",
]
