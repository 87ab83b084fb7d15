"""
The cross fractal: retained squares, thin and thick parts, square types.

Grid squares of the first level are indexed ``(i, j)`` with ``i`` the column
(x) and ``j`` the row (y), both in ``0 .. 2**m - 1``.  Columns and rows
``c = 2**(m-1) - 1`` and ``c + 1`` touch a midsegment.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from scipy import ndimage

from ..errors import ConstructionError, ParameterError
from ..models import TypeCountsReport

logger = logging.getLogger(__name__)

SquareClass = Literal["type1", "type2", "type3", "type4"]
SQUARE_CLASSES = ("type1", "type2", "type3", "type4")
Section = Literal["thinV", "thinH", "thick"]


def expected_square_count(m: int) -> int:
    return 2 ** (2 * m) - 2 ** (m + 2) + 12


@dataclass(frozen=True)
class CrossModel:
    """Level-one squares kept by the cross construction for a given ``m``."""

    m: int
    squares: Tuple[Tuple[int, int], ...] = field(repr=False)

    @property
    def grid(self) -> int:
        return 1 << self.m

    @property
    def mid(self) -> int:
        """First of the two midsegment columns (and rows)."""
        return (1 << (self.m - 1)) - 1

    @property
    def p(self) -> int:
        return len(self.squares)

    @property
    def block_side(self) -> int:
        """Side of each of the four thick blocks, in grid squares."""
        return self.mid

    @cached_property
    def index(self) -> Dict[Tuple[int, int], int]:
        return {sq: k for k, sq in enumerate(self.squares)}

    @cached_property
    def columns(self) -> np.ndarray:
        return np.array([i for i, _ in self.squares], dtype=np.int64)

    @cached_property
    def rows(self) -> np.ndarray:
        return np.array([j for _, j in self.squares], dtype=np.int64)

    def section(self, square: Tuple[int, int]) -> Section:
        i, j = square
        top = self.grid - 1
        if i in (self.mid, self.mid + 1) and j in (0, top):
            return "thinV"
        if j in (self.mid, self.mid + 1) and i in (0, top):
            return "thinH"
        return "thick"

    def block_of(self, square: Tuple[int, int]) -> Tuple[int, int]:
        """(0 or 1, 0 or 1): which thick block, by the corner of the parent it holds."""
        i, j = square
        return int(i > self.mid), int(j > self.mid)

    def depth(self, square: Tuple[int, int]) -> Optional[int]:
        """1 + distance in squares to the boundary of its thick block; None if thin."""
        if self.section(square) != "thick":
            return None
        i, j = square
        s = self.block_side
        a = i if i < self.mid else i - (self.mid + 2)
        b = j if j < self.mid else j - (self.mid + 2)
        return 1 + min(a, b, s - 1 - a, s - 1 - b)


def build_cross(m: int) -> CrossModel:
    """Enumerate the retained squares and check their count and connectivity."""
    if m < 2:
        raise ParameterError(f"The cross construction needs m >= 2, got {m}")
    n = 1 << m
    c = (1 << (m - 1)) - 1
    idx = np.arange(n)
    on_mid = np.isin(idx, (c, c + 1))
    on_side = (idx == 0) | (idx == n - 1)
    omit = (on_mid[:, None] | on_mid[None, :]) & ~(on_side[:, None] | on_side[None, :])
    keep = ~omit

    squares = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(keep)))
    if len(squares) != expected_square_count(m):
        raise ConstructionError(
            f"m={m}: {len(squares)} squares, expected {expected_square_count(m)}"
        )
    _, components = ndimage.label(keep)
    if components != 1:
        raise ConstructionError(f"m={m}: retained squares form {components} pieces")
    logger.debug(f"Cross m={m}: p={len(squares)}")
    return CrossModel(m, squares)


def classify(model: CrossModel, square: Tuple[int, int], L: int) -> SquareClass:
    """Type of a retained square given the depth parameter ``L``.

    Corners are type 1, their edge neighbours and the thin squares type 2; the
    rest is type 4 from depth L/2 on and type 3 below.
    """
    if square not in model.index:
        raise ParameterError(f"Square {square} is not retained for m={model.m}")
    top = model.grid - 1
    i, j = square
    if i in (0, top) and j in (0, top):
        return "type1"
    next_to_corner = (i in (0, top) and j in (1, top - 1)) or (
        j in (0, top) and i in (1, top - 1)
    )
    if next_to_corner or model.section(square) != "thick":
        return "type2"
    depth = model.depth(square)
    assert depth is not None
    return "type4" if 2 * depth >= L else "type3"


def kappa_factor(cls: SquareClass, L: int) -> Fraction:
    return {
        "type1": Fraction(1),
        "type2": Fraction(1, 2),
        "type3": Fraction(1, 3),
        "type4": Fraction(1, L),
    }[cls]


@dataclass(frozen=True)
class ConductivityTable:
    """Class and conductivity factor of every level-one square for one ``L``."""

    model: CrossModel
    L: int
    classes: Tuple[SquareClass, ...]
    factors: Tuple[Fraction, ...]

    def kappa(self, path: List[int]) -> Fraction:
        out = Fraction(1)
        for digit in path:
            out *= self.factors[digit]
        return out

    def factor_array(self) -> np.ndarray:
        return np.array(self.factors, dtype=object)


def conductivity_table(model: CrossModel, L: int) -> ConductivityTable:
    if L < 2:
        raise ParameterError(f"L must be at least 2, got {L}")
    classes = tuple(classify(model, sq, L) for sq in model.squares)
    return ConductivityTable(
        model, L, classes, tuple(kappa_factor(c, L) for c in classes)
    )


def type_counts(model: CrossModel, L: int) -> TypeCountsReport:
    """Census of square types; raises if the corner count is not 4."""
    classes = conductivity_table(model, L).classes
    counts = {name: classes.count(name) for name in SQUARE_CLASSES}
    if counts["type1"] != 4:
        raise ConstructionError(f"Expected 4 corner squares, found {counts['type1']}")
    thin = sum(1 for sq in model.squares if model.section(sq) != "thick")
    return TypeCountsReport(
        m=model.m,
        L=L,
        t1=counts["type1"],
        t2=counts["type2"],
        t3=counts["type3"],
        t4=counts["type4"],
        thin=thin,
        t3_over_side=counts["type3"] / model.grid,
        t4_over_area=counts["type4"] / model.grid**2,
    )


def path_of(model: CrossModel, code: int, level: int) -> List[int]:
    """Level-one square indices from the top down for a base-p cell code."""
    digits = []
    for _ in range(level):
        code, d = divmod(code, model.p)
        digits.append(d)
    return digits[::-1]


def classification_rows(
    model: CrossModel, L: int, level: int
) -> List[Dict[str, object]]:
    """One record per level-``level`` square: path, class and depth of its last step."""
    table = conductivity_table(model, L)
    rows = []
    for code in range(model.p**level):
        path = path_of(model, code, level)
        steps = [model.squares[d] for d in path]
        last = steps[-1]
        rows.append(
            {
                "level": level,
                "square": code,
                "path": ";".join(f"{i},{j}" for i, j in steps),
                "class": table.classes[path[-1]],
                "depth": model.depth(last) or "",
                "kappa": str(table.kappa(path)),
            }
        )
    return rows


def model_record(model: CrossModel) -> Dict[str, object]:
    return {"m": model.m, "p": model.p, "squares": [list(sq) for sq in model.squares]}
