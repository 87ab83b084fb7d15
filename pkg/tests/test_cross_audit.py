import numpy as np
import pytest

from holderlab.cross.approx import (
    lipschitz_audit,
    piecewise_affine_approx,
    random_standard_field,
    standard_audit,
)
from holderlab.cross.audit import conductivity_audit, conductivity_sweep
from holderlab.cross.complex import CrossComplex
from holderlab.errors import ContractError
from holderlab.levelset.complex import TriangleComplex
from holderlab.levelset.engine import LevelQuery
from holderlab.levelset.fields import affine_field, constant_field, xcoord_field


def test_xcoord_fronts_conduct() -> None:
    fld = xcoord_field(CrossComplex(3, 2))
    report = conductivity_audit(fld, LevelQuery(0.3), L=4)
    assert report.passed
    assert report.checked > 0


def test_conductivity_needs_the_cross() -> None:
    fld = xcoord_field(TriangleComplex(2))
    with pytest.raises(ContractError):
        conductivity_audit(fld, LevelQuery(0.3), L=4)


def test_random_standard_sweep() -> None:
    report = conductivity_sweep(3, 4, 2, seeds=range(6), queries_per_field=3)
    assert report.passed
    assert report.violations == 0


def test_sweep_does_not_depend_on_workers() -> None:
    serial = conductivity_sweep(3, 4, 2, seeds=range(4), workers=1)
    threaded = conductivity_sweep(3, 4, 2, seeds=range(4), workers=4)
    assert serial.model_dump() == threaded.model_dump()


def test_random_standard_field() -> None:
    cx = CrossComplex(3, 2)
    fld = random_standard_field(cx, seed=1)
    again = random_standard_field(cx, seed=1)
    ids = cx.vertex_ids()
    assert np.all(np.isfinite(fld.at(ids)))
    assert np.array_equal(fld.at(ids), again.at(ids))
    assert standard_audit(fld, 2).passed
    with pytest.raises(ContractError):
        random_standard_field(cx, seed=1, base_level=2)


def test_constant_field_approximation() -> None:
    source = constant_field(CrossComplex(2, 2), 0.25)
    result = piecewise_affine_approx(source, 1, lipschitz=0.0)
    assert result.passed
    ids = result.field.complex.vertex_ids()
    assert np.all(result.field.at(ids) == 0.25)


def test_affine_field_approximation() -> None:
    source = affine_field(CrossComplex(2, 2), 1.0, 0.5)
    result = piecewise_affine_approx(source, 1, lipschitz=float(np.hypot(1.0, 0.5)))
    assert result.passed
    assert [r.name for r in result.reports] == ["standard", "lipschitz", "anchors"]
    with pytest.raises(ContractError):
        piecewise_affine_approx(source, 2, lipschitz=1.0)


def test_lipschitz_audit_flags_a_small_bound() -> None:
    fld = affine_field(CrossComplex(2, 1), 2.0, 0.0)
    assert lipschitz_audit(fld, 2.0).passed
    assert not lipschitz_audit(fld, 1.0).passed
