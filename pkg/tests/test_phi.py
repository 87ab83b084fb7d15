from fractions import Fraction

import numpy as np
import pytest

from holderlab.errors import ContractError, GuardError, ParameterError
from holderlab.geometry import VERTEX_A, VERTEX_B, VERTEX_C
from holderlab.levelset.complex import TriangleComplex
from holderlab.levelset.engine import LevelQuery, build_front
from holderlab.phi.admissible import AdmissibleSet, parse_blocks
from holderlab.phi.audits import (
    ab_monotone_audit,
    consistency_audit,
    constancy_audit,
    cylinder_image_audit,
    dimension_certificate,
    holder_audit,
    level_cell_count,
    optimize_params,
    rank_oracle_audit,
)
from holderlab.phi.witness import Witness, witness_field


@pytest.fixture(scope="module")
def aset():
    return AdmissibleSet(3, 1)


def test_admissible_table(aset) -> None:
    assert aset.size == 7
    assert len(aset.table) == 7
    assert aset.table[-1] == (3, 3, 3)
    assert aset.contains((0, 3, 3))
    assert not aset.contains((0, 2, 3))
    with pytest.raises(ParameterError):
        AdmissibleSet(3, 0)


def test_rank_and_unrank_agree(aset) -> None:
    for k in range(aset.size**2):
        assert aset.rank(aset.unrank(k, 2)) == (k, 2)


def test_witness_corner_values(aset) -> None:
    witness = Witness(aset)
    assert witness.at_point(VERTEX_A) == 1
    assert witness.at_point(VERTEX_B) == 0
    assert witness.at_point(VERTEX_C) == 0


def test_eval_top_block(aset) -> None:
    result = Witness(aset).eval_blocks(parse_blocks("333"))
    assert result.interval == ["6/7", "7/7"]
    assert result.rank == 6
    assert not result.constant


def test_eval_inadmissible_block_is_constant(aset) -> None:
    result = Witness(aset).eval_blocks(parse_blocks("333|003"))
    assert result.constant
    assert result.interval[0] == result.interval[1]
    with pytest.raises(ContractError):
        Witness(aset).eval_blocks(parse_blocks("33"))


def test_rank_counting_matches_side_order(aset) -> None:
    report = rank_oracle_audit(aset, 2)
    assert report.passed
    assert report.checked == 27 + 27**2


def test_cylinder_images(aset) -> None:
    assert cylinder_image_audit(aset, 2).passed


def test_shared_vertices_get_one_value(aset) -> None:
    assert consistency_audit(aset, depth=3).passed


def test_side_ab_is_monotone(aset) -> None:
    assert ab_monotone_audit(aset, depth=4).passed


def test_witness_constant_off_admissible_blocks(aset) -> None:
    assert constancy_audit(aset, [(0, 0, 3)]).passed
    with pytest.raises(ContractError):
        constancy_audit(aset, [(3, 3, 3)])


def test_witness_holder_bound(aset) -> None:
    report = holder_audit(aset, 0.5, depth=4)
    assert report.passed
    assert report.max_ratio <= 1
    with pytest.raises(ContractError):
        holder_audit(aset, 0.9, depth=4)


@pytest.fixture(scope="module")
def witness_fields(aset):
    witness = Witness(aset)
    return {n: witness_field(witness, TriangleComplex(4 * n)) for n in (1, 2)}


def test_level_cells_match_measured_front(aset, witness_fields) -> None:
    rng = np.random.default_rng(4)
    for r in rng.uniform(0.01, 0.99, size=20).tolist():
        for n, fld in witness_fields.items():
            row = level_cell_count(aset, r, n)
            front = build_front(fld, 4 * n, LevelQuery(Fraction(r)))
            assert row.depth == 4 * n
            assert row.count == len(front)
            assert row.count <= row.bound
            assert row.cylinder_triangles <= row.bound
            assert len(row.chain) == n
    with pytest.raises(GuardError):
        level_cell_count(aset, Fraction(3, 7), 1)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_optimized_parameters_meet_both_constraints(alpha) -> None:
    result = optimize_params(alpha, 0.05)
    replay = AdmissibleSet(result.kstar, result.w)
    assert replay.size == result.size
    assert replay.size >= 2 ** ((result.kstar + result.w) * alpha)
    assert result.w / (result.kstar + result.w) <= result.target


def test_dimension_certificate() -> None:
    cert = dimension_certificate(3, 1, 0.5)
    assert cert.size == 7
    assert cert.box_bound == 0.25
    assert cert.binom_lower == 6
    assert cert.binom_ok
