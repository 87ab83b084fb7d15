"""The cross construction as a cell complex on the square lattice."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Tuple

import numpy as np

from ..levelset.complex import CellComplex
from .model import CrossModel, build_cross


class CrossComplex(CellComplex):
    """Squares of side ``2**(-m l)`` at level ``l``; corners run LL, LR, UR, UL."""

    name = "cross"
    corners_per_cell = 4

    def __init__(self, m: int | CrossModel, depth: int):
        self.model = m if isinstance(m, CrossModel) else build_cross(m)
        self.branching = self.model.p
        super().__init__(depth, 1 << (self.model.m * depth))

    @property
    def m(self) -> int:
        return self.model.m

    def lower_left(self, level: int, ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Lattice coordinates of the lower-left corner of each cell."""
        self.check_level(level)
        ids = np.asarray(ids, dtype=np.int64)
        X = np.zeros_like(ids)
        Y = np.zeros_like(ids)
        for t in range(level):
            digit = (ids // self.branching ** (level - 1 - t)) % self.branching
            shift = self.m * (self.depth - 1 - t)
            X += self.model.columns[digit] << shift
            Y += self.model.rows[digit] << shift
        return X, Y

    def cell_side(self, level: int) -> int:
        """Cell side in lattice units."""
        return 1 << (self.m * (self.depth - level))

    def corners(self, level: int, ids: np.ndarray) -> np.ndarray:
        X, Y = self.lower_left(level, ids)
        s = self.cell_side(level)
        return np.stack(
            [
                self.vertex_id(X, Y),
                self.vertex_id(X + s, Y),
                self.vertex_id(X + s, Y + s),
                self.vertex_id(X, Y + s),
            ],
            axis=1,
        )

    def vertex_ids(self) -> np.ndarray:
        return np.unique(self.corners(self.depth, self.cells(self.depth)))

    def cartesian(self, ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        i, j = self.lattice_coordinates(ids)
        return i / self.side, j / self.side

    def exact_x(self, vertex: int) -> Fraction:
        return Fraction(int(vertex) // (self.side + 1), self.side)

    def cell_diameter(self, level: int) -> float:
        return math.sqrt(2.0) * 2.0 ** (-self.m * level)
