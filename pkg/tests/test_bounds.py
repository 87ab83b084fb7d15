import math

import numpy as np
import pytest

from holderlab.bounds import (
    asymptotic_gap,
    curve_table,
    derivative,
    eval_h,
    exponent_c,
    identity_residual,
    invert_h,
    monotonicity_certificate,
    series_exponent_fit,
    series_term,
    tail_index,
)
from holderlab.config import config
from holderlab.errors import DomainError


def test_endpoint_values() -> None:
    assert eval_h("lower_hausdorff", 0.5) > 1
    assert eval_h("lower_box", 1 / 3) > 1
    assert abs(eval_h("upper_witness", 0.5) - 1) <= 1e-12


@pytest.mark.parametrize("kind", ["lower_hausdorff", "lower_box", "upper_witness"])
def test_inversion_residual(kind) -> None:
    grid = np.linspace(0.001, 0.999, 1000)
    t = invert_h(kind, grid)
    assert np.max(np.abs(eval_h(kind, t) - grid)) <= 1e-12


@pytest.mark.parametrize("kind", ["lower_hausdorff", "lower_box", "upper_witness"])
def test_bound_functions_increase(kind) -> None:
    assert monotonicity_certificate(kind, points=500).passed


def test_witness_curve_is_flat_at_its_end() -> None:
    assert abs(derivative("upper_witness", 0.5)) < 1e-12
    assert derivative("lower_hausdorff", 0.25) > 0


def test_identity_between_curves() -> None:
    t = np.linspace(0.001, 0.5, 500)
    assert np.max(np.abs(identity_residual(t))) <= 1e-12


def test_exponent_sign_follows_bound() -> None:
    for d1 in np.linspace(0.02, 0.48, 24):
        h = eval_h("lower_hausdorff", d1)
        for alpha in np.linspace(0.02, 0.98, 25):
            if abs(h - alpha) > 1e-9:
                c = exponent_c(float(d1), float(alpha))
                assert math.copysign(1, c) == math.copysign(1, h - alpha)
    for d1 in np.linspace(0.02, 0.32, 16):
        h = eval_h("lower_box", d1)
        for alpha in np.linspace(0.02, 0.98, 25):
            if abs(h - alpha) > 1e-9:
                c = exponent_c(float(d1), float(alpha), "box")
                assert math.copysign(1, c) == math.copysign(1, h - alpha)


def test_convergent_series() -> None:
    fit = series_exponent_fit(0.1, 0.9)
    assert fit["exponent"] < 0
    assert fit["relative_error"] < 0.05
    n = tail_index(0.1, 0.9, tol=1e-9)
    assert n >= 1
    assert series_term(n, 0.1, 0.9).term < 1e-9


def test_divergent_series_grows() -> None:
    a = series_term(400, 0.4, 0.5)
    b = series_term(401, 0.4, 0.5)
    assert b.log_term > a.log_term
    assert a.log_space
    with pytest.raises(DomainError):
        tail_index(0.4, 0.5)


def test_log_space_matches_direct_evaluation(monkeypatch) -> None:
    direct = series_term(50, 0.2, 0.8)
    assert not direct.log_space
    monkeypatch.setattr(config, "SERIES_LOG_THRESHOLD", 10)
    logged = series_term(50, 0.2, 0.8)
    assert logged.log_space
    assert math.isclose(direct.log_term, logged.log_term, rel_tol=1e-9)
    assert math.isclose(direct.partial_sum, logged.partial_sum, rel_tol=1e-9)


def test_relative_gap_shrinks_as_alpha_vanishes() -> None:
    gaps = asymptotic_gap([10.0**-k for k in range(1, 7)])
    assert np.all(np.diff(gaps) < 0)


def test_curve_table_ordering() -> None:
    table = curve_table(np.linspace(0.05, 0.95, 19))
    assert len(table.rows) == 19
    assert table.violations == []
    for row in table.rows:
        assert row.lower_hausdorff <= row.upper + 1e-9
        assert row.lower_box >= row.lower_hausdorff - 1e-9


def test_domain_errors() -> None:
    with pytest.raises(DomainError):
        invert_h("upper_witness", 1.5)
    with pytest.raises(DomainError):
        eval_h("lower_box", 0.4)
    with pytest.raises(DomainError):
        curve_table([0.0, 0.5])
