"""
Exact dyadic arithmetic and affine geometry in the frame of the triangle ABC.

Points are written as ``A + u(B - A) + v(C - A)``.  With A = (0, 0), B = (1, 0)
and C = (0, 1) every vertex of both constructions has dyadic coordinates; the
equilateral metric only enters through the quadratic form ``u^2 + uv + v^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Tuple, Union

from .config import config
from .errors import ContractError, ResourceBudgetError

logger = logging.getLogger(__name__)

DyadicLike = Union["Dyadic", int]


@total_ordering
@dataclass(frozen=True)
class Dyadic:
    """The number ``numerator / 2**exponent`` kept in canonical form."""

    numerator: int
    exponent: int = 0

    def __post_init__(self) -> None:
        if self.exponent < 0:
            raise ValueError(f"Negative exponent: {self.exponent}")
        num, exp = self.numerator, self.exponent
        if num == 0:
            exp = 0
        else:
            shift = min((num & -num).bit_length() - 1, exp)
            num >>= shift
            exp -= shift
        if exp > config.MAX_EXPONENT_BITS:
            raise ResourceBudgetError(
                f"Dyadic exponent {exp} exceeds budget of "
                f"{config.MAX_EXPONENT_BITS} bits"
            )
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)

    @classmethod
    def of(cls, value: DyadicLike) -> Dyadic:
        return value if isinstance(value, Dyadic) else cls(int(value))

    @classmethod
    def from_fraction(cls, value: Fraction) -> Dyadic:
        den = value.denominator
        if den & (den - 1):
            raise ContractError(f"{value} is not a dyadic rational")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        """Read the canonical ``n/2^k`` form (a bare integer is accepted)."""
        text = text.strip()
        if "/" not in text:
            return cls(int(text))
        num, den = text.split("/", 1)
        if not den.startswith("2^"):
            raise ValueError(f"Not a dyadic literal: {text!r}")
        return cls(int(num), int(den[2:]))

    def _aligned(self, other: Dyadic) -> Tuple[int, int, int]:
        exp = max(self.exponent, other.exponent)
        return (
            self.numerator << (exp - self.exponent),
            other.numerator << (exp - other.exponent),
            exp,
        )

    def __add__(self, other: DyadicLike) -> Dyadic:
        a, b, exp = self._aligned(Dyadic.of(other))
        return Dyadic(a + b, exp)

    __radd__ = __add__

    def __sub__(self, other: DyadicLike) -> Dyadic:
        a, b, exp = self._aligned(Dyadic.of(other))
        return Dyadic(a - b, exp)

    def __rsub__(self, other: DyadicLike) -> Dyadic:
        return Dyadic.of(other) - self

    def __mul__(self, other: DyadicLike) -> Dyadic:
        other = Dyadic.of(other)
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.numerator, self.exponent)

    def __lt__(self, other: DyadicLike) -> bool:
        a, b, _ = self._aligned(Dyadic.of(other))
        return a < b

    def halve(self, times: int = 1) -> Dyadic:
        return Dyadic(self.numerator, self.exponent + times)

    def compare(self, other: DyadicLike) -> int:
        """-1, 0 or 1 as self is less than, equal to or greater than other."""
        a, b, _ = self._aligned(Dyadic.of(other))
        return (a > b) - (a < b)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        return math.ldexp(float(self.numerator), -self.exponent)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)
QUARTER = Dyadic(1, 2)


@dataclass(frozen=True)
class BaryPoint:
    """Point (or displacement) with coordinates in the frame (A, B - A, C - A)."""

    u: Dyadic
    v: Dyadic

    @classmethod
    def of(cls, u: DyadicLike, v: DyadicLike) -> BaryPoint:
        return cls(Dyadic.of(u), Dyadic.of(v))

    def __add__(self, other: BaryPoint) -> BaryPoint:
        return BaryPoint(self.u + other.u, self.v + other.v)

    def __sub__(self, other: BaryPoint) -> BaryPoint:
        return BaryPoint(self.u - other.u, self.v - other.v)

    def scale(self, factor: DyadicLike) -> BaryPoint:
        return BaryPoint(self.u * factor, self.v * factor)

    def midpoint(self, other: BaryPoint) -> BaryPoint:
        return BaryPoint((self.u + other.u).halve(), (self.v + other.v).halve())

    def in_triangle(self) -> bool:
        return self.u >= ZERO and self.v >= ZERO and self.u + self.v <= ONE

    def on_ab(self) -> bool:
        return self.v.is_zero()

    def cartesian(self) -> Tuple[float, float]:
        """Coordinates in the equilateral embedding with side length 1."""
        u, v = float(self.u), float(self.v)
        return u + v / 2.0, v * math.sqrt(3.0) / 2.0

    def __str__(self) -> str:
        return f"({self.u}, {self.v})"


VERTEX_A = BaryPoint(ZERO, ZERO)
VERTEX_B = BaryPoint(ONE, ZERO)
VERTEX_C = BaryPoint(ZERO, ONE)
TRIANGLE = (VERTEX_A, VERTEX_B, VERTEX_C)


def sq_len_equilateral(w: BaryPoint) -> Dyadic:
    """Exact squared Euclidean length of ``w`` in the side-1 equilateral frame."""
    return w.u * w.u + w.u * w.v + w.v * w.v


def ab_order_key(p: BaryPoint) -> Dyadic:
    """Distance from B along side AB, as ``1 - u``."""
    if not p.on_ab():
        raise ContractError(f"Point {p} is not on side AB")
    return ONE - p.u


@dataclass(frozen=True)
class Segment:
    start: BaryPoint
    end: BaryPoint

    def __post_init__(self) -> None:
        if self.start == self.end:
            raise ContractError(f"Segment endpoints coincide at {self.start}")

    def sq_length(self) -> Dyadic:
        return sq_len_equilateral(self.end - self.start)

    def ab_range(self) -> Tuple[Dyadic, Dyadic]:
        """Order keys of both ends along AB, the end nearer B first."""
        lo, hi = sorted((ab_order_key(self.start), ab_order_key(self.end)))
        return lo, hi


@dataclass(frozen=True)
class AffineMap2:
    """``x -> L x + t`` with ``L = [[a, b], [c, d]]`` acting on (u, v) columns."""

    linear: Tuple[Dyadic, Dyadic, Dyadic, Dyadic]
    translation: BaryPoint

    @classmethod
    def from_entries(
        cls, linear: Iterable[DyadicLike], translation: BaryPoint
    ) -> AffineMap2:
        a, b, c, d = (Dyadic.of(x) for x in linear)
        return cls((a, b, c, d), translation)

    @classmethod
    def identity(cls) -> AffineMap2:
        return cls((ONE, ZERO, ZERO, ONE), VERTEX_A)

    @classmethod
    def homothety(cls, ratio: Dyadic, translation: BaryPoint) -> AffineMap2:
        return cls((ratio, ZERO, ZERO, ratio), translation)

    def apply_linear(self, w: BaryPoint) -> BaryPoint:
        a, b, c, d = self.linear
        return BaryPoint(a * w.u + b * w.v, c * w.u + d * w.v)

    def apply(self, p: BaryPoint) -> BaryPoint:
        return self.apply_linear(p) + self.translation

    def compose(self, inner: AffineMap2) -> AffineMap2:
        """The map ``self(inner(x))``."""
        a, b, c, d = self.linear
        e, f, g, h = inner.linear
        linear = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        return AffineMap2(linear, self.apply(inner.translation))

    def determinant(self) -> Dyadic:
        a, b, c, d = self.linear
        return a * d - b * c

    def inverse(self) -> AffineMap2:
        det = self.determinant().to_fraction()
        if det == 0:
            raise ContractError(f"Map {self} is singular")
        a, b, c, d = (x.to_fraction() for x in self.linear)
        linear = tuple(Dyadic.from_fraction(x / det) for x in (d, -b, -c, a))
        inv = AffineMap2(linear, VERTEX_A)  # type: ignore[arg-type]
        shift = inv.apply_linear(self.translation)
        return AffineMap2(inv.linear, BaryPoint(-shift.u, -shift.v))

    def squared_ratio(self) -> Dyadic:
        """Scale factor of sq_len_equilateral; raises if the map is not a similarity."""
        edges = (VERTEX_B - VERTEX_A, VERTEX_C - VERTEX_A, VERTEX_C - VERTEX_B)
        ratios = {
            (sq_len_equilateral(self.apply_linear(e)).to_fraction())
            / sq_len_equilateral(e).to_fraction()
            for e in edges
        }
        if len(ratios) != 1:
            raise ContractError(f"Map {self} is not a similarity: ratios {ratios}")
        return Dyadic.from_fraction(ratios.pop())

    def __str__(self) -> str:
        a, b, c, d = self.linear
        return f"[[{a}, {b}], [{c}, {d}]] + {self.translation}"

