"""Functions sampled on the vertices of a cell complex."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ..config import config
from ..errors import ConstructionError, ContractError, ResourceBudgetError
from ..models import AuditReport
from ..parallel import item_rng
from .complex import CellComplex, TriangleComplex

logger = logging.getLogger(__name__)

ROW_CHUNK = 256


@dataclass
class VertexField:
    """Values on every construction vertex of ``complex`` up to its depth.

    Float fields store NaN off the construction; exact fields hold ``Fraction``
    objects (None off the construction).
    """

    complex: CellComplex
    values: np.ndarray
    exact: bool = False
    holder: Optional[Tuple[float, float]] = None
    label: str = "field"
    audit: Optional[AuditReport] = field(default=None, repr=False)

    @property
    def depth(self) -> int:
        return self.complex.depth

    def at(self, ids: np.ndarray) -> np.ndarray:
        return self.values[np.asarray(ids, dtype=np.int64)]

    def vertex_values(self) -> np.ndarray:
        return self.at(self.complex.vertex_ids())

    def as_float(self) -> VertexField:
        if not self.exact:
            return self
        values = np.full(self.values.shape[0], np.nan)
        ids = self.complex.vertex_ids()
        values[ids] = [float(v) for v in self.values[ids]]
        return VertexField(self.complex, values, False, self.holder, self.label)


def field_from_function(
    complex: CellComplex,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    label: str = "function",
    holder: Optional[Tuple[float, float]] = None,
) -> VertexField:
    """Sample a vectorized function of Euclidean coordinates."""
    ids = complex.vertex_ids()
    x, y = complex.cartesian(ids)
    values = np.full(complex.num_lattice_points, np.nan)
    values[ids] = np.broadcast_to(np.asarray(fn(x, y), dtype=float), ids.shape)
    return VertexField(complex, values, exact=False, holder=holder, label=label)


def constant_field(complex: CellComplex, value: float) -> VertexField:
    return field_from_function(
        complex,
        lambda x, y: np.full_like(x, value),
        label="constant",
        holder=(0.0, 1.0),
    )


def affine_field(
    complex: CellComplex, a: float, b: float, c: float = 0.0
) -> VertexField:
    return field_from_function(
        complex,
        lambda x, y: a * x + b * y + c,
        label="affine",
        holder=(float(np.hypot(a, b)), 1.0),
    )


def xcoord_field(complex: CellComplex, exact: bool = False) -> VertexField:
    """The first Euclidean coordinate; exact fields hold dyadic fractions."""
    if not exact:
        return field_from_function(
            complex, lambda x, y: x, label="xcoord", holder=(1.0, 1.0)
        )
    ids = complex.vertex_ids()
    values = np.full(complex.num_lattice_points, None, dtype=object)
    for vid in ids.tolist():
        values[vid] = complex.exact_x(vid)
    return VertexField(complex, values, exact=True, holder=(1.0, 1.0), label="xcoord")


def max_holder_ratio(
    x: np.ndarray,
    y: np.ndarray,
    values: np.ndarray,
    alpha: float,
    pair_budget: Optional[int] = None,
) -> Tuple[float, int]:
    """Largest |f(p) - f(q)| / |p - q|^alpha over all point pairs.

    Pairs are walked in row chunks; more than ``pair_budget`` pairs is refused.
    Returns (max ratio, pairs checked).
    """
    pair_budget = config.HOLDER_PAIR_BUDGET if pair_budget is None else pair_budget
    n = x.shape[0]
    if n < 2:
        return 0.0, 0

    total_pairs = n * (n - 1) // 2
    if total_pairs > pair_budget:
        raise ResourceBudgetError(
            f"{total_pairs} vertex pairs exceed the pair budget {pair_budget}"
        )
    best = 0.0
    for start in range(0, n, ROW_CHUNK):
        rows = slice(start, min(start + ROW_CHUNK, n))
        dist = np.hypot(x[rows, None] - x[None, :], y[rows, None] - y[None, :])
        diff = np.abs(values[rows, None] - values[None, :])
        upper = np.arange(n)[None, :] > np.arange(start, rows.stop)[:, None]
        valid = upper & (dist > 0)
        if np.any(valid):
            best = max(best, float(np.max(diff[valid] / dist[valid] ** alpha)))
    return best, total_pairs


def holder_audit(
    field: VertexField,
    c: float,
    alpha: float,
    pair_budget: Optional[int] = None,
) -> AuditReport:
    """Check |f(v) - f(v')| <= c |v - v'|^alpha on every vertex pair."""
    flt = field.as_float()
    ids = flt.complex.vertex_ids()
    x, y = flt.complex.cartesian(ids)
    best, checked = max_holder_ratio(x, y, flt.values[ids], alpha, pair_budget)
    ratio = best / c if c > 0 else (0.0 if best == 0 else float("inf"))
    return AuditReport(
        name="holder",
        passed=ratio <= 1.0 + 1e-12,
        checked=checked,
        violations=0 if ratio <= 1.0 + 1e-12 else 1,
        max_ratio=ratio,
        details={"c": c, "alpha": alpha},
    )


def _midpoint_displacement(
    complex: TriangleComplex,
    rng: np.random.Generator,
    c: float,
    alpha: float,
    roughness: float,
) -> np.ndarray:
    values = np.full(complex.num_lattice_points, np.nan)
    roots = complex.corners(0, np.zeros(1, dtype=np.int64))[0]
    values[roots] = rng.uniform(0.0, c / 2.0, size=3)

    for level in range(complex.depth):
        corners = complex.corners(level, complex.cells(level))
        ends = np.concatenate(
            [corners[:, [0, 1]], corners[:, [0, 2]], corners[:, [1, 2]]]
        )
        pi, pj = complex.lattice_coordinates(ends[:, 0])
        qi, qj = complex.lattice_coordinates(ends[:, 1])
        mids = complex.vertex_id((pi + qi) // 2, (pj + qj) // 2)
        mids, first = np.unique(mids, return_index=True)
        ends = ends[first]

        amplitude = roughness * (c / 4.0) * (2.0 ** -(level + 1)) ** alpha
        noise = rng.uniform(-1.0, 1.0, size=mids.shape[0])
        values[mids] = values[ends].mean(axis=1) + amplitude * noise
    return values


def random_holder_field(
    complex: TriangleComplex,
    seed: int,
    c: float = 1.0,
    alpha: float = 0.5,
    roughness: float = 1.0,
    pair_budget: Optional[int] = None,
    max_retries: Optional[int] = None,
) -> VertexField:
    """Midpoint-displacement field whose Hölder bound is audited before returning.

    A failed audit redraws with a derived seed and half the roughness.
    """
    if c <= 0 or not 0 < alpha <= 1:
        raise ContractError(f"Need c > 0 and 0 < alpha <= 1, got c={c} alpha={alpha}")
    max_retries = config.FIELD_MAX_RETRIES if max_retries is None else max_retries

    for attempt in range(max_retries + 1):
        rng = item_rng(seed, attempt)
        values = _midpoint_displacement(
            complex, rng, c, alpha, roughness / 2.0**attempt
        )
        field = VertexField(
            complex, values, holder=(c, alpha), label=f"random(seed={seed})"
        )
        report = holder_audit(field, c, alpha, pair_budget)
        if report.passed:
            field.audit = report
            return field
        logger.debug(
            f"Field seed={seed} attempt={attempt} failed Hölder audit "
            f"(ratio {report.max_ratio:.4f}); retrying"
        )

    raise ConstructionError(
        f"No {c}-Hölder-{alpha} field after {max_retries + 1} attempts (seed={seed})"
    )


def random_vertex_values(
    complex: CellComplex, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """(trials, lattice points) uniform values; off-construction entries unused."""
    return rng.uniform(0.0, 1.0, size=(trials, complex.num_lattice_points))
