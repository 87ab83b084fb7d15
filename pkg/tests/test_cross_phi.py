from fractions import Fraction

import numpy as np
import pytest

from holderlab.cross.complex import CrossComplex
from holderlab.cross.model import build_cross, path_of
from holderlab.cross.phi import (
    cross_phi_eval,
    cross_phi_grid,
    cross_phi_holder,
    cross_phi_of_fraction,
    expansion_of,
    level_point,
    level_section_count,
    level_section_slope,
    parse_digits,
    thin_squares,
)
from holderlab.errors import DomainError, GuardError, ResourceBudgetError
from holderlab.levelset.engine import LevelQuery, build_front
from holderlab.levelset.fields import VertexField


def test_digit_strings() -> None:
    assert cross_phi_eval(2, "(2)") == 1
    assert cross_phi_eval(2, "(1)") == 0
    assert cross_phi_eval(3, "4,(3)") == Fraction(1, 2)
    assert cross_phi_eval(3, "4,0") == Fraction(1, 2)
    assert cross_phi_eval(3, "4,7") == 1
    assert cross_phi_eval(3, "2") == 0
    assert cross_phi_eval(3, "5") == 1


def test_rational_points() -> None:
    assert cross_phi_of_fraction(2, Fraction(1, 3)) == 0
    assert cross_phi_of_fraction(2, Fraction(2, 3)) == 1
    assert cross_phi_of_fraction(2, Fraction(1, 2)) == Fraction(1, 2)
    assert cross_phi_of_fraction(2, Fraction(0)) == 0
    assert cross_phi_of_fraction(2, Fraction(1)) == 1


def test_periodic_expansion() -> None:
    expansion = expansion_of(3, Fraction(1, 7))
    assert expansion.prefix == ()
    assert expansion.period == (1,)
    assert expansion.value() == Fraction(1, 7)


def test_bad_digits() -> None:
    with pytest.raises(DomainError):
        parse_digits(2, "4")
    with pytest.raises(DomainError):
        cross_phi_eval(1, "0")
    with pytest.raises(DomainError):
        expansion_of(2, Fraction(3, 2))


def test_grid_for_m3() -> None:
    grid = cross_phi_grid(3, 1)
    assert grid.tolist() == [0, 0, 0, 0, 0.5, 1, 1, 1, 1]


def test_grid_matches_exact_values() -> None:
    grid = cross_phi_grid(2, 3)
    for k in range(grid.shape[0]):
        assert grid[k] == float(cross_phi_of_fraction(2, Fraction(k, 64)))


def test_grid_is_monotone() -> None:
    grid = cross_phi_grid(3, 3)
    assert grid[0] == 0 and grid[-1] == 1
    assert np.all(np.diff(grid) >= 0)


def test_holder_ratio_is_finite() -> None:
    ratio = cross_phi_holder(2, K=3)
    assert 0 < ratio < 10


def test_sections_double_each_level() -> None:
    rng = np.random.default_rng(7)
    for r in rng.uniform(0.01, 0.99, size=30).tolist():
        for n in range(1, 6):
            assert level_section_count(3, r, n) == 2**n


def _exact_cross_field(model, n) -> VertexField:
    cx = CrossComplex(model, n)
    values = np.full(cx.num_lattice_points, None, dtype=object)
    for vid in cx.vertex_ids().tolist():
        values[vid] = cross_phi_of_fraction(model.m, cx.exact_x(vid))
    return VertexField(cx, values, exact=True, label="cross_phi")


def test_sections_match_vertical_thin_front() -> None:
    model = build_cross(2)
    for n in (1, 2, 3):
        fld = _exact_cross_field(model, n)
        for r in (0.3, 0.55, 0.8):
            front = build_front(fld, n, LevelQuery(Fraction(r)))
            thin = [
                code
                for code in front.cells.tolist()
                if all(
                    model.section(model.squares[d]) == "thinV"
                    for d in path_of(model, code, n)
                )
            ]
            assert level_section_count(2, r, n) == len(thin)


def test_thin_squares_grow_fourfold_and_refuse_deep_levels() -> None:
    for n in (1, 2, 3):
        X, Y = thin_squares(3, n)
        assert X.shape == Y.shape == (4**n,)
    with pytest.raises(ResourceBudgetError):
        thin_squares(2, 11)


def test_section_slope() -> None:
    counts, slope = level_section_slope(3, 0.3, range(1, 7))
    assert counts == [2, 4, 8, 16, 32, 64]
    assert abs(slope - 1 / 3) < 0.02


def test_section_guards() -> None:
    with pytest.raises(GuardError):
        level_section_count(3, 0.5, 3)
    with pytest.raises(GuardError):
        level_section_count(3, 1.0, 2)
    with pytest.raises(DomainError):
        level_point(3, Fraction(1, 3))


def test_level_point_hits_its_level() -> None:
    x = level_point(2, Fraction(3, 4))
    assert cross_phi_of_fraction(2, x) == Fraction(3, 4)
