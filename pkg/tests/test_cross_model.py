import pytest

from holderlab.cross.complex import CrossComplex
from holderlab.cross.model import (
    build_cross,
    classification_rows,
    classify,
    conductivity_table,
    expected_square_count,
    model_record,
    path_of,
    type_counts,
)
from holderlab.errors import ParameterError


@pytest.mark.parametrize("m", range(2, 8))
def test_square_count(m) -> None:
    model = build_cross(m)
    assert model.p == expected_square_count(m) == 2 ** (2 * m) - 2 ** (m + 2) + 12


def test_known_square_counts() -> None:
    assert [build_cross(m).p for m in (2, 3, 4)] == [12, 44, 204]


def test_cross_needs_m_at_least_two() -> None:
    with pytest.raises(ParameterError):
        build_cross(1)
    with pytest.raises(ParameterError):
        conductivity_table(build_cross(3), 1)


def test_classes_of_m3() -> None:
    model = build_cross(3)
    assert classify(model, (0, 0), 4) == "type1"
    assert classify(model, (1, 0), 4) == "type2"
    assert classify(model, (3, 0), 4) == "type2"
    assert classify(model, (0, 4), 4) == "type2"
    assert classify(model, (2, 0), 4) == "type3"
    assert classify(model, (2, 0), 2) == "type4"
    assert classify(model, (1, 1), 4) == "type4"
    assert classify(model, (1, 1), 5) == "type3"
    with pytest.raises(ParameterError):
        classify(model, (3, 3), 4)


@pytest.mark.parametrize("m", range(3, 8))
def test_type_census(m) -> None:
    counts = type_counts(build_cross(m), 16)
    assert counts.t1 == 4
    assert counts.thin == 8
    assert counts.t2 == 16
    assert counts.t1 + counts.t2 + counts.t3 + counts.t4 == expected_square_count(m)
    assert counts.t4_over_area < 1


def test_deep_squares_for_m4() -> None:
    model = build_cross(4)
    assert model.depth((3, 3)) == 4
    assert type_counts(model, 16).t3 == 184
    assert type_counts(model, 16).t4 == 0
    assert type_counts(model, 8).t4 > 0


def test_conductivity_of_paths() -> None:
    model = build_cross(3)
    table = conductivity_table(model, 4)
    corner = model.index[(0, 0)]
    thin = model.index[(3, 0)]
    assert path_of(model, corner * model.p + thin, 2) == [corner, thin]
    assert str(table.kappa([corner, thin, thin])) == "1/4"


def test_classification_rows() -> None:
    model = build_cross(3)
    rows = classification_rows(model, 4, 1)
    assert len(rows) == 44
    assert rows[0]["path"] == "0,0"
    assert rows[0]["class"] == "type1"
    assert rows[0]["kappa"] == "1"
    assert model_record(model)["p"] == 44


def test_cross_complex_lattice() -> None:
    cx = CrossComplex(2, 1)
    assert cx.branching == 12
    assert cx.corners(0, [0]).tolist() == [[0, 20, 24, 4]]
    # the centre point only touches omitted squares
    assert len(cx.vertex_ids()) == 24
    assert cx.exact_x(20) == 1
