"""
Hierarchical cell complexes on an integer vertex lattice.

Cells of level ``l`` are numbered by base-``branching`` codes of their child
digits, so ``children = id * branching + digit`` and ``parent = id // branching``.
Vertex ids index a square integer lattice at the finest level ``depth``, so a
vertex keeps its id at every level.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Tuple

import numpy as np

from ..errors import ContractError


class CellComplex(ABC):
    """A self-similar subdivision with cells addressed by digit codes."""

    name: str = "complex"
    branching: int
    corners_per_cell: int

    def __init__(self, depth: int, side: int):
        if depth < 0:
            raise ContractError(f"Depth must be non-negative, got {depth}")
        self.depth = depth
        # lattice points per axis minus one
        self.side = side

    @property
    def num_lattice_points(self) -> int:
        return (self.side + 1) ** 2

    def vertex_id(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return np.asarray(i, dtype=np.int64) * (self.side + 1) + np.asarray(
            j, dtype=np.int64
        )

    def lattice_coordinates(self, ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ids = np.asarray(ids, dtype=np.int64)
        return ids // (self.side + 1), ids % (self.side + 1)

    def num_cells(self, level: int) -> int:
        return self.branching**level

    def cells(self, level: int) -> np.ndarray:
        self.check_level(level)
        return np.arange(self.num_cells(level), dtype=np.int64)

    def children(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        digits = np.arange(self.branching, dtype=np.int64)
        return (ids[:, None] * self.branching + digits[None, :]).reshape(-1)

    def parent(self, ids: np.ndarray) -> np.ndarray:
        return np.asarray(ids, dtype=np.int64) // self.branching

    def check_level(self, level: int) -> None:
        if not 0 <= level <= self.depth:
            raise ContractError(
                f"Level {level} outside 0..{self.depth} of {self.name} complex"
            )

    @abstractmethod
    def corners(self, level: int, ids: np.ndarray) -> np.ndarray:
        """Vertex ids of the cell corners, shape (len(ids), corners_per_cell)."""

    @abstractmethod
    def vertex_ids(self) -> np.ndarray:
        """Ids of every construction vertex at the finest level."""

    @abstractmethod
    def cartesian(self, ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Euclidean coordinates of vertices."""

    @abstractmethod
    def exact_x(self, vertex: int) -> Fraction:
        """Exact first Euclidean coordinate of a vertex."""

    @abstractmethod
    def cell_diameter(self, level: int) -> float:
        """Diameter of any level-``level`` cell."""


class TriangleComplex(CellComplex):
    """Sierpiński triangle with side 1; corner j of a cell is its image of A, B, C."""

    name = "triangle"
    branching = 3
    corners_per_cell = 3

    def __init__(self, depth: int):
        super().__init__(depth, 1 << depth)

    def corners(self, level: int, ids: np.ndarray) -> np.ndarray:
        self.check_level(level)
        ids = np.asarray(ids, dtype=np.int64)
        s = self.side
        # (cells, corner, axis) in lattice units
        pts = np.broadcast_to(
            np.array([[0, 0], [s, 0], [0, s]], dtype=np.int64), (ids.shape[0], 3, 2)
        ).copy()
        rows = np.arange(ids.shape[0])
        for t in range(level):
            digit = (ids // 3 ** (level - 1 - t)) % 3
            keep = pts[rows, digit]
            pts = (pts + keep[:, None, :]) // 2
            pts[rows, digit] = keep
        return self.vertex_id(pts[:, :, 0], pts[:, :, 1])

    def vertex_ids(self) -> np.ndarray:
        if self.depth == 0:
            return self.vertex_id(
                np.array([0, self.side, 0]), np.array([0, 0, self.side])
            )
        finest = self.corners(self.depth, self.cells(self.depth))
        return np.unique(finest)

    def cartesian(self, ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        i, j = self.lattice_coordinates(ids)
        u, v = i / self.side, j / self.side
        return u + v / 2.0, v * (math.sqrt(3.0) / 2.0)

    def exact_x(self, vertex: int) -> Fraction:
        i, j = divmod(int(vertex), self.side + 1)
        return Fraction(2 * i + j, 2 * self.side)

    def cell_diameter(self, level: int) -> float:
        return 2.0**-level
