from fractions import Fraction

import pytest

from holderlab.config import config
from holderlab.errors import ContractError, ResourceBudgetError
from holderlab.geometry import (
    HALF,
    ONE,
    VERTEX_A,
    VERTEX_B,
    VERTEX_C,
    AffineMap2,
    BaryPoint,
    Dyadic,
    Segment,
    ab_order_key,
    sq_len_equilateral,
)


def test_dyadic_canonical_form() -> None:
    assert Dyadic(4, 3) == Dyadic(1, 1)
    assert Dyadic(0, 7) == Dyadic(0)
    assert str(Dyadic(6, 3)) == "3/2^2"
    assert Dyadic.parse("3/2^2") == Dyadic(3, 2)
    assert Dyadic.parse("5") == Dyadic(5)


def test_dyadic_arithmetic_is_exact() -> None:
    x = Dyadic(1, 1) + Dyadic(1, 2)
    assert x.to_fraction() == Fraction(3, 4)
    assert (x * x).to_fraction() == Fraction(9, 16)
    assert ONE - x == Dyadic(1, 2)
    assert Dyadic(3, 2).compare(HALF) == 1
    assert float(Dyadic(1, 3)) == 0.125


def test_dyadic_rejects_non_dyadic_and_oversized() -> None:
    with pytest.raises(ContractError):
        Dyadic.from_fraction(Fraction(1, 3))
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")
    with pytest.raises(ResourceBudgetError):
        Dyadic(1, config.MAX_EXPONENT_BITS + 1)


def test_equilateral_lengths() -> None:
    for a, b in ((VERTEX_A, VERTEX_B), (VERTEX_B, VERTEX_C), (VERTEX_A, VERTEX_C)):
        assert sq_len_equilateral(b - a) == ONE
    mid = VERTEX_B.midpoint(VERTEX_C)
    assert mid == BaryPoint.of(HALF, HALF)
    assert sq_len_equilateral(mid - VERTEX_B).to_fraction() == Fraction(1, 4)


def test_ab_order_key() -> None:
    assert ab_order_key(VERTEX_A) == ONE
    assert ab_order_key(VERTEX_B) == Dyadic(0)
    with pytest.raises(ContractError):
        ab_order_key(VERTEX_C)


def test_segment() -> None:
    side = Segment(VERTEX_A, VERTEX_B.midpoint(VERTEX_A))
    assert side.sq_length().to_fraction() == Fraction(1, 4)
    assert side.ab_range() == (HALF, ONE)
    with pytest.raises(ContractError):
        Segment(VERTEX_C, VERTEX_C)
    with pytest.raises(ContractError):
        Segment(VERTEX_A, VERTEX_C).ab_range()


def test_affine_map_inverse_and_ratio() -> None:
    s = AffineMap2.homothety(HALF, VERTEX_B.scale(HALF))
    assert s.apply(VERTEX_B) == VERTEX_B
    assert s.apply(VERTEX_A) == BaryPoint.of(HALF, 0)
    assert s.squared_ratio() == Dyadic(1, 2)
    assert s.compose(s.inverse()) == AffineMap2.identity()
