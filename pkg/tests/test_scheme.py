import math

import numpy as np
import pytest

from holderlab.errors import ContractError
from holderlab.scheme import (
    TriAddress,
    closed_form_histogram,
    cover_audit,
    expand_scheme,
    geometric_child_audit,
    histogram,
    kappa_of,
    verify_kappa_lemma,
)


@pytest.fixture(scope="module")
def atlas():
    return expand_scheme(6)


def test_level_sizes(atlas) -> None:
    assert atlas.complete
    for n in range(1, 7):
        assert atlas.size(n) == 3 * 7 ** (n - 1)


def test_histogram_level_three(atlas) -> None:
    report = histogram(atlas, 3)
    assert report.per_root[0] == {0: 1, 1: 12, 2: 36}
    assert report.total == 147
    assert report.matches


def test_closed_form_recursion_to_twenty() -> None:
    for n in range(1, 21):
        counts = closed_form_histogram(n)
        assert counts == [math.comb(n - 1, k) * 6**k for k in range(n)]
        assert 3 * sum(counts) == 3 * 7 ** (n - 1)


def test_kappa_lemma_holds_exhaustively(atlas) -> None:
    report = verify_kappa_lemma(atlas)
    assert report.passed
    assert report.violations == 0
    assert report.checked == sum(3 * 7 ** (n - 1) for n in range(1, 7))


def test_every_level_tiles_the_triangle(atlas) -> None:
    for n in range(1, 7):
        assert cover_audit(atlas, n).passed


def test_same_child_rule_matches_vertex_incidence(atlas) -> None:
    report = geometric_child_audit(atlas, max_level=5)
    assert report.passed
    assert report.checked > 0


def test_kappa_of_intermediate_triangles() -> None:
    assert kappa_of(TriAddress((2, 2, 2))) == (3, 0)
    assert kappa_of(TriAddress((0, 1))) == (None, 1)
    assert kappa_of(TriAddress((0, 1, 2))) == (2, 1)
    with pytest.raises(ContractError):
        kappa_of(TriAddress(()))


def test_address_codes() -> None:
    address = TriAddress.parse("1,0,2")
    assert TriAddress.from_code(address.code, 3) == address
    assert address.parent() == TriAddress((1, 0))
    with pytest.raises(ContractError):
        TriAddress((3,))


def test_budget_leaves_atlas_incomplete() -> None:
    atlas = expand_scheme(5, budget=100)
    assert not atlas.complete
    assert atlas.max_n == 2


def test_checkpoints_resume(tmp_path) -> None:
    first = expand_scheme(3, cache_dir=str(tmp_path))
    assert (tmp_path / "scheme_level_01.npz").exists()
    resumed = expand_scheme(4, cache_dir=str(tmp_path))
    assert np.array_equal(first.level(3).codes, resumed.level(3).codes)
    assert resumed.size(4) == 3 * 7**3
