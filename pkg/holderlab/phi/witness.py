"""
Exact evaluation of the witness function.

A point is described by the digits of the maps leading to it and a tail:
``"3"`` for the limit of repeated S3 (the vertex A) and ``"03"`` for one more
digit 0 followed by repeated S3 (the vertices B and C).  Values are
``Fraction``s; cylinders of admissible blocks map onto intervals of width
``size**-m``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Literal, Sequence, Tuple

import numpy as np

from ..errors import ContractError
from ..geometry import VERTEX_A, VERTEX_B, VERTEX_C, BaryPoint, Dyadic
from ..levelset.complex import TriangleComplex
from ..levelset.fields import VertexField
from ..models import PhiEvalResult
from .admissible import (
    AdmissibleSet,
    Block,
    default_generators,
    flatten,
    format_block,
    zero_parity,
)
from .generators import GenSystem

logger = logging.getLogger(__name__)

Tail = Literal["3", "03"]

TAIL_OF_CORNER: Tuple[Tail, Tail, Tail] = ("3", "03", "03")


@dataclass(frozen=True)
class Witness:
    """The witness function for one admissible set."""

    aset: AdmissibleSet
    gens: GenSystem = field(default_factory=default_generators)

    @property
    def size(self) -> int:
        return self.aset.size

    def value(self, digits: Sequence[int], tail: Tail = "3") -> Fraction:
        """Value at the point with the given digits followed by ``tail``."""
        digits = list(digits)
        if 1 in digits:
            # constant on a digit-1 piece: the junction of its 0 and 2 neighbours
            digits = digits[: digits.index(1)] + [0]
            tail = "03"
        if tail == "03":
            digits.append(0)
        elif tail != "3":
            raise ContractError(f"Unknown tail {tail!r}")

        k = self.aset.k_star
        digits += [3] * ((-len(digits)) % k)
        blocks = [tuple(digits[i : i + k]) for i in range(0, len(digits), k)]

        value, reversed_ = Fraction(0), False
        for j, block in enumerate(blocks, start=1):
            value += Fraction(self.aset.less_count(block, reversed_), self.size**j)
            if not self.aset.contains(block):
                return value
            reversed_ ^= zero_parity(block)
        # repeated 333 blocks: the largest block, or the smallest when reversed
        if not reversed_:
            value += Fraction(1, self.size ** len(blocks))
        return value

    def extend_constant(self, prefix: Sequence[int]) -> Fraction:
        """Constant value on the piece ``prefix`` followed by digit 1."""
        if any(d not in (0, 2, 3) for d in prefix):
            raise ContractError("The prefix before the digit 1 must avoid digit 1")
        return self.value(list(prefix) + [1])

    def eval_blocks(self, blocks: Sequence[Block]) -> PhiEvalResult:
        """Value enclosure on the cylinder of ``blocks``."""
        for block in blocks:
            self.aset.check_block(block)
        names = [format_block(b) for b in blocks]
        m = len(blocks)

        if 1 in flatten(blocks):
            v = self.value(flatten(blocks))
            return PhiEvalResult(
                blocks=names, interval=[str(v), str(v)], size=self.size, constant=True
            )

        rank, used = self.aset.rank(blocks)
        den = self.size**m
        if used < m or not self.aset.contains(blocks[-1]):
            v = Fraction(rank, den)
            return PhiEvalResult(
                blocks=names, interval=[str(v), str(v)], size=self.size, constant=True
            )
        return PhiEvalResult(
            blocks=names,
            interval=[f"{rank}/{den}", f"{rank + 1}/{den}"],
            rank=rank,
            size=self.size,
            constant=False,
        )

    def address_of(self, point: BaryPoint) -> Tuple[List[int], Tail]:
        """Digits and tail of a dyadic point of the attractor, by pulling back."""
        digits: List[int] = []
        steps = 2 * max(point.u.exponent, point.v.exponent) + 4
        p = point
        for _ in range(steps):
            if p == VERTEX_A:
                return digits, "3"
            if p in (VERTEX_B, VERTEX_C):
                return digits, "03"
            try:
                label, p = next(self.gens.preimages(p))
            except StopIteration as e:
                raise ContractError(f"Point {point} is off the attractor") from e
            digits.append(label[0])
            if label[0] == 1:
                return digits, "3"
        raise ContractError(f"Point {point} is not a vertex of the construction")

    def at_point(self, point: BaryPoint) -> Fraction:
        digits, tail = self.address_of(point)
        return self.value(digits, tail)


def witness_field(witness: Witness, complex: TriangleComplex) -> VertexField:
    """Exact witness values on every vertex of the triangle complex."""
    ids = complex.vertex_ids()
    values = np.full(complex.num_lattice_points, None, dtype=object)
    i, j = complex.lattice_coordinates(ids)
    for vid, a, b in zip(ids.tolist(), i.tolist(), j.tolist()):
        point = BaryPoint(Dyadic(a, complex.depth), Dyadic(b, complex.depth))
        values[vid] = witness.at_point(point)
    logger.info(f"Witness field on {ids.shape[0]} vertices at depth {complex.depth}")
    return VertexField(
        complex,
        values,
        exact=True,
        label=f"witness(k*={witness.aset.k_star}, w={witness.aset.w})",
    )
