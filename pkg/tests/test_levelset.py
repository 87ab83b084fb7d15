from fractions import Fraction

import numpy as np
import pytest

from holderlab.cross.complex import CrossComplex
from holderlab.errors import ContractError, GuardError, ResourceBudgetError
from holderlab.levelset.complex import TriangleComplex
from holderlab.levelset.engine import (
    LevelQuery,
    build_front,
    build_measure,
    cover_audit,
    descend,
    front_slope,
    front_stats,
    mu_kappa_audit,
    mu_kappa_sweep,
    random_cover_audit,
    sample_queries,
)
from holderlab.levelset.fields import (
    affine_field,
    holder_audit,
    max_holder_ratio,
    random_holder_field,
    xcoord_field,
)
from holderlab.scheme import expand_scheme


@pytest.fixture(scope="module")
def atlas():
    return expand_scheme(4)


def test_xcoord_front_at_level_one() -> None:
    fld = xcoord_field(TriangleComplex(1))
    front = build_front(fld, 1, LevelQuery(0.4))
    assert len(front) == 2
    assert sorted(front.cells.tolist()) == [0, 2]


def test_exact_front_matches_float_front() -> None:
    cx = TriangleComplex(4)
    exact = build_front(xcoord_field(cx, exact=True), 4, LevelQuery(Fraction(2, 5)))
    approx = build_front(xcoord_field(cx), 4, LevelQuery(0.4))
    assert np.array_equal(exact.cells, approx.cells)


def test_vertex_values_are_rejected() -> None:
    cx = TriangleComplex(2)
    with pytest.raises(GuardError):
        build_front(xcoord_field(cx), 1, LevelQuery(0.5))
    with pytest.raises(GuardError):
        build_front(xcoord_field(cx, exact=True), 1, LevelQuery(Fraction(1, 4)))


def test_children_cover_parent_values() -> None:
    cx = TriangleComplex(4)
    fields = [
        xcoord_field(cx),
        affine_field(cx, 0.3, -1.2),
        random_holder_field(cx, 3),
    ]
    for fld in fields:
        for level in range(cx.depth):
            assert cover_audit(fld, level).passed


@pytest.mark.parametrize(
    "complex", [TriangleComplex(1), CrossComplex(2, 1), CrossComplex(3, 1)]
)
def test_random_vertex_values_cover(complex) -> None:
    report = random_cover_audit(complex, trials=2000, seed=11)
    assert report.passed
    assert report.checked == 2000


def test_level_measure_is_a_probability_per_level() -> None:
    fld = xcoord_field(TriangleComplex(5))
    tree = descend(fld, 0, 0, LevelQuery(0.4), 5)
    assert tree.is_complete()
    measure = build_measure(tree)
    for index in range(tree.depth + 1):
        assert measure.exact_total(index) == 1


def test_descend_needs_a_straddling_root() -> None:
    fld = xcoord_field(TriangleComplex(2))
    with pytest.raises(ContractError):
        descend(fld, 1, 1, LevelQuery(0.4), 1)


def test_mu_bounded_by_kappa_on_xcoord(atlas) -> None:
    fld = xcoord_field(TriangleComplex(4))
    for r in (0.1, 0.3, 0.4, 0.7):
        assert mu_kappa_audit(fld, LevelQuery(r), atlas).passed


def test_mu_kappa_sweep_is_deterministic(atlas) -> None:
    serial = mu_kappa_sweep(atlas, 4, seeds=[1, 2, 3], queries_per_field=3, workers=1)
    threaded = mu_kappa_sweep(atlas, 4, seeds=[1, 2, 3], queries_per_field=3, workers=3)
    assert serial.passed
    assert serial.model_dump() == threaded.model_dump()


def test_mu_kappa_needs_the_triangle(atlas) -> None:
    fld = xcoord_field(CrossComplex(2, 1))
    with pytest.raises(ContractError):
        mu_kappa_audit(fld, LevelQuery(0.3), atlas)


def test_random_fields_carry_their_audit() -> None:
    cx = TriangleComplex(4)
    fld = random_holder_field(cx, 5, c=1.0, alpha=0.5)
    assert fld.audit is not None and fld.audit.passed
    again = holder_audit(fld, 1.0, 0.5)
    assert again.passed
    with pytest.raises(ContractError):
        random_holder_field(cx, 5, c=0.0)


def test_holder_ratio_covers_every_pair_across_chunks() -> None:
    rng = np.random.default_rng(3)
    x, y, v = rng.uniform(size=(3, 300))
    best, checked = max_holder_ratio(x, y, v, 0.7)
    expected = max(
        abs(v[i] - v[j]) / np.hypot(x[i] - x[j], y[i] - y[j]) ** 0.7
        for i in range(300)
        for j in range(i)
    )
    assert checked == 300 * 299 // 2
    assert best == pytest.approx(expected, rel=1e-12)


def test_holder_audit_refuses_pairs_over_budget() -> None:
    fld = random_holder_field(TriangleComplex(3), 7)
    n = fld.complex.vertex_ids().shape[0]
    report = holder_audit(fld, 1.0, 0.5)
    assert report.checked == n * (n - 1) // 2
    with pytest.raises(ResourceBudgetError):
        holder_audit(fld, 1.0, 0.5, pair_budget=n)


def test_sampled_queries_are_guarded_and_reproducible() -> None:
    fld = random_holder_field(TriangleComplex(3), 8)
    first = sample_queries(fld, 6, seed=2)
    second = sample_queries(fld, 6, seed=2)
    assert [q.r for q in first] == [q.r for q in second]
    values = fld.vertex_values()
    for q in first:
        assert np.min(np.abs(values - q.r)) >= q.guard


def test_front_sizes_grow_under_xcoord() -> None:
    fld = xcoord_field(TriangleComplex(6))
    report = front_slope(fld, LevelQuery(0.4))
    assert report.counts[0] == 2
    assert all(b >= a for a, b in zip(report.counts, report.counts[1:]))
    assert report.fit_slope is not None and 0 < report.fit_slope <= 1


def test_front_stats_conductivity_sum(atlas) -> None:
    fld = xcoord_field(TriangleComplex(5))
    rows = front_stats(fld, LevelQuery(0.4), atlas, d1=0.5)
    assert [row.n for row in rows] == [1, 2, 3]
    for row in rows:
        assert row.front_size >= 1
        assert row.kappa_total >= 1 - 1e-12
        assert row.max_kappa <= 1
    with pytest.raises(ContractError):
        front_stats(fld, LevelQuery(0.4), atlas, d1=0.5, levels=[4])
