"""The similarity maps that define the witness function."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from ..errors import ConstructionError
from ..geometry import (
    HALF,
    QUARTER,
    TRIANGLE,
    VERTEX_A,
    VERTEX_B,
    VERTEX_C,
    AffineMap2,
    BaryPoint,
    Dyadic,
)

logger = logging.getLogger(__name__)

# (digit, branch); digit 3 has a single map
Label = Tuple[int, int]

LABELS: Tuple[Label, ...] = ((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2), (3, 1))


def label_name(label: Label) -> str:
    digit, branch = label
    return "S3" if digit == 3 else f"S{digit}{branch}"


def branch_label(digit: int, branch: int) -> Label:
    """Both branches of digit 3 are the same map."""
    return (3, 1) if digit == 3 else (digit, branch)


@dataclass(frozen=True)
class GenSystem:
    maps: Dict[Label, AffineMap2]
    inverses: Dict[Label, AffineMap2]

    def map(self, digit: int, branch: int = 1) -> AffineMap2:
        return self.maps[branch_label(digit, branch)]

    def compose(self, digits: Tuple[int, ...], branches: Tuple[int, ...]) -> AffineMap2:
        out = AffineMap2.identity()
        for digit, branch in zip(digits, branches):
            out = out.compose(self.map(digit, branch))
        return out

    def preimages(self, point: BaryPoint) -> Iterator[Tuple[Label, BaryPoint]]:
        """Labels whose image triangle holds ``point``, with the pulled-back point."""
        for label in LABELS:
            pulled = self.inverses[label].apply(point)
            if pulled.in_triangle():
                yield label, pulled


def _three_quarters(p: BaryPoint, q: BaryPoint) -> BaryPoint:
    return p.scale(Dyadic(1, 2)) + q.scale(Dyadic(3, 2))


def _pinned() -> List[Tuple[Label, BaryPoint, BaryPoint]]:
    return [
        ((0, 1), VERTEX_A, VERTEX_B),
        ((0, 1), VERTEX_C, _three_quarters(VERTEX_A, VERTEX_B)),
        ((0, 2), VERTEX_A, VERTEX_C),
        ((0, 2), VERTEX_B, _three_quarters(VERTEX_A, VERTEX_C)),
        ((1, 1), VERTEX_C, VERTEX_B.midpoint(VERTEX_C)),
        ((1, 2), VERTEX_B, VERTEX_B.midpoint(VERTEX_C)),
        ((2, 1), VERTEX_A, VERTEX_A.midpoint(VERTEX_B)),
        ((2, 2), VERTEX_A, VERTEX_A.midpoint(VERTEX_C)),
        ((3, 1), VERTEX_A, VERTEX_A),
    ]


def generators() -> GenSystem:
    """Build the seven distinct maps and check ratios, pins and orientation."""
    q, mq = QUARTER, -QUARTER
    maps = {
        (0, 1): AffineMap2.from_entries((mq, mq, q, 0), VERTEX_B),
        (0, 2): AffineMap2.from_entries((0, q, mq, mq), VERTEX_C),
        (1, 1): AffineMap2.homothety(q, BaryPoint.of(HALF, QUARTER)),
        (1, 2): AffineMap2.homothety(q, BaryPoint.of(QUARTER, HALF)),
        (2, 1): AffineMap2.homothety(q, BaryPoint.of(HALF, 0)),
        (2, 2): AffineMap2.homothety(q, BaryPoint.of(0, HALF)),
        (3, 1): AffineMap2.homothety(HALF, VERTEX_A),
    }

    for label, s in maps.items():
        expected = Dyadic(1, 2) if label[0] == 3 else Dyadic(1, 4)
        if s.squared_ratio() != expected:
            raise ConstructionError(f"{label_name(label)} has the wrong ratio")
        if s.determinant() <= 0:
            raise ConstructionError(f"{label_name(label)} reverses orientation")
        if not all(s.apply(v).in_triangle() for v in TRIANGLE):
            raise ConstructionError(f"{label_name(label)} leaves the triangle")

    for label, source, image in _pinned():
        if maps[label].apply(source) != image:
            raise ConstructionError(
                f"{label_name(label)}({source}) = {maps[label].apply(source)}, "
                f"expected {image}"
            )

    inverses = {label: s.inverse() for label, s in maps.items()}
    return GenSystem(maps, inverses)


@dataclass(frozen=True)
class LatticeMap:
    """``x -> (L x + t) / 2**e`` with integer entries."""

    linear: Tuple[int, int, int, int]
    translation: Tuple[int, int]
    exponent: int

    @classmethod
    def of(cls, s: AffineMap2) -> LatticeMap:
        entries = list(s.linear) + [s.translation.u, s.translation.v]
        e = max(x.exponent for x in entries)
        ints = [x.numerator << (e - x.exponent) for x in entries]
        return cls((ints[0], ints[1], ints[2], ints[3]), (ints[4], ints[5]), e)

    def compose(self, inner: LatticeMap) -> LatticeMap:
        a, b, c, d = self.linear
        e, f, g, h = inner.linear
        tu, tv = inner.translation
        su, sv = self.translation
        shift = 1 << inner.exponent
        return LatticeMap(
            (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h),
            (a * tu + b * tv + su * shift, c * tu + d * tv + sv * shift),
            self.exponent + inner.exponent,
        )

    def vertex(self, corner: int, scale: int) -> Tuple[int, int]:
        """Image of corner 0/1/2 (A/B/C) in units of 2**-scale."""
        a, b, c, d = self.linear
        tu, tv = self.translation
        u, v = ((tu, tv), (tu + a, tv + c), (tu + b, tv + d))[corner]
        shift = scale - self.exponent
        if shift < 0:
            raise ConstructionError("Lattice scale below map exponent")
        return u << shift, v << shift


LATTICE_IDENTITY = LatticeMap((1, 0, 0, 1), (0, 0), 0)
