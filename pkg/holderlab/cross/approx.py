"""
Standard piecewise-affine fields on the cross construction.

A field is standard at level n when every level-n square has two adjacent
corners with equal values.  ``piecewise_affine_approx`` produces one from a
Lipschitz field; ``random_standard_field`` draws one whose value inside every
column of the base level follows the cross function.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np

from ..errors import ConstructionError, ContractError
from ..levelset.fields import VertexField, max_holder_ratio
from ..models import AuditReport
from ..parallel import item_rng
from .complex import CrossComplex
from .phi import cross_phi_grid

logger = logging.getLogger(__name__)

Axis = Literal["x", "y"]


@dataclass
class ApproxResult:
    field: VertexField
    reports: List[AuditReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _sample(
    source: VertexField, target: CrossComplex, X: np.ndarray, Y: np.ndarray
) -> np.ndarray:
    """Source values at target lattice points."""
    src = source.complex
    factor = src.side // target.side
    return source.at(src.vertex_id(X * factor, Y * factor))


def piecewise_affine_approx(
    source: VertexField,
    n: int,
    lipschitz: float,
    pair_budget: Optional[int] = None,
) -> ApproxResult:
    """Level-(n+1) field: constant on thick blocks, linear across the corridors.

    Each thick block of a level-n square takes the value of the square corner it
    holds; the thin squares between two blocks interpolate linearly.
    """
    src = source.complex
    if not isinstance(src, CrossComplex):
        raise ContractError("Approximation needs a field on the cross complex")
    if not 0 <= n < src.depth:
        raise ContractError(f"Level {n} needs 0 <= n < field depth {src.depth}")
    target = CrossComplex(src.model, n + 1)
    source = source.as_float()
    model = target.model
    p, c = model.p, model.mid
    h = target.cell_side(n + 1)

    cells = target.cells(n + 1)
    parents, digits = np.divmod(cells, p)
    QX, QY = target.lower_left(n, parents)
    side = target.cell_side(n)
    # values at the parent corners (LL, LR, UR, UL)
    anchor = np.stack(
        [
            _sample(source, target, QX, QY),
            _sample(source, target, QX + side, QY),
            _sample(source, target, QX + side, QY + side),
            _sample(source, target, QX, QY + side),
        ],
        axis=1,
    )

    corners = target.corners(n + 1, cells)
    X, Y = target.lattice_coordinates(corners)
    lx = (X - QX[:, None]) // h
    ly = (Y - QY[:, None]) // h
    cols = model.columns[digits][:, None]
    rows = model.rows[digits][:, None]
    top = model.grid - 1

    right = cols > model.mid
    upper = rows > model.mid
    block = np.where(upper, np.where(right, 2, 3), np.where(right, 1, 0))
    block = np.broadcast_to(block, lx.shape)
    values = np.take_along_axis(anchor, block, axis=1)

    thin_v = np.isin(cols, (c, c + 1)) & np.isin(rows, (0, top))
    tv = np.broadcast_to((lx - c) / 2.0, lx.shape)
    low = np.where(rows == 0, anchor[:, [0]], anchor[:, [3]])
    high = np.where(rows == 0, anchor[:, [1]], anchor[:, [2]])
    values = np.where(thin_v, (1 - tv) * low + tv * high, values)

    thin_h = np.isin(rows, (c, c + 1)) & np.isin(cols, (0, top))
    th = np.broadcast_to((ly - c) / 2.0, ly.shape)
    low = np.where(cols == 0, anchor[:, [0]], anchor[:, [1]])
    high = np.where(cols == 0, anchor[:, [3]], anchor[:, [2]])
    values = np.where(thin_h, (1 - th) * low + th * high, values)

    out = np.full(target.num_lattice_points, np.nan)
    flat_ids = corners.reshape(-1)
    flat_vals = values.reshape(-1)
    out[flat_ids] = flat_vals
    clash = np.abs(out[flat_ids] - flat_vals)
    if np.any(clash > 1e-12):
        raise ConstructionError(
            f"Approximation disagrees on shared vertices by {float(clash.max()):.3g}"
        )

    fld = VertexField(
        target,
        out,
        holder=(lipschitz * 2.0 ** (model.m - 1), 1.0),
        label=f"approx({source.label}, n={n})",
    )
    reports = [
        standard_audit(fld, n + 1),
        lipschitz_audit(fld, lipschitz * 2.0 ** (model.m - 1), pair_budget),
        _anchor_audit(anchor, fld, target, QX, QY, side),
    ]
    logger.info(
        f"Approximation at level {n + 1}: "
        + ", ".join(f"{r.name}={'ok' if r.passed else 'FAIL'}" for r in reports)
    )
    return ApproxResult(fld, reports)


def standard_audit(fld: VertexField, level: int) -> AuditReport:
    """Every level-``level`` square has two adjacent corners with equal values."""
    cx = fld.complex
    cells = cx.cells(level)
    vals = fld.as_float().at(cx.corners(level, cells))
    equal = np.abs(vals - np.roll(vals, -1, axis=1)) <= 1e-12
    ok = equal.any(axis=1)
    bad = cells[~ok]
    return AuditReport(
        name="standard",
        passed=bad.size == 0,
        checked=int(cells.shape[0]),
        violations=int(bad.size),
        details={"level": level},
        samples=[str(b) for b in bad[:20].tolist()],
    )


def lipschitz_audit(
    fld: VertexField, bound: float, pair_budget: Optional[int] = None
) -> AuditReport:
    ids = fld.complex.vertex_ids()
    x, y = fld.complex.cartesian(ids)
    best, checked = max_holder_ratio(x, y, fld.values[ids], 1.0, pair_budget)
    ratio = best / bound if bound > 0 else (0.0 if best == 0 else float("inf"))
    return AuditReport(
        name="lipschitz",
        passed=ratio <= 1.0 + 1e-9,
        checked=checked,
        violations=0 if ratio <= 1.0 + 1e-9 else 1,
        max_ratio=ratio,
        details={"bound": bound},
    )


def _anchor_audit(
    anchor: np.ndarray,
    fld: VertexField,
    cx: CrossComplex,
    QX: np.ndarray,
    QY: np.ndarray,
    side: int,
) -> AuditReport:
    ids = np.stack(
        [
            cx.vertex_id(QX, QY),
            cx.vertex_id(QX + side, QY),
            cx.vertex_id(QX + side, QY + side),
            cx.vertex_id(QX, QY + side),
        ],
        axis=1,
    )
    bad = fld.at(ids) != anchor
    return AuditReport(
        name="anchors",
        passed=not bool(bad.any()),
        checked=int(ids.size),
        violations=int(bad.sum()),
    )


def random_standard_field(
    complex: CrossComplex, seed: int, base_level: int = 1
) -> VertexField:
    """Values ``a * phi(t) + b`` in every base-level column (or row) of the square.

    Random values sit on the grid lines of spacing ``2**(-m * base_level)`` along
    one randomly chosen axis, and ``t`` is the position inside the column.
    """
    if not 0 <= base_level < complex.depth:
        raise ContractError(
            f"Base level {base_level} must be below depth {complex.depth}"
        )
    rng = item_rng(seed, 0)
    axis: Axis = "x" if rng.integers(0, 2) == 0 else "y"
    columns = 1 << (complex.m * base_level)
    knots = rng.uniform(0.0, 1.0, size=columns + 1)

    # phi on the local grid inside one column
    local = cross_phi_grid(complex.m, complex.depth - base_level)
    step = local.shape[0] - 1

    ids = complex.vertex_ids()
    i, j = complex.lattice_coordinates(ids)
    coord = i if axis == "x" else j
    col, offset = np.divmod(coord, step)
    # the right edge of the square belongs to the last column
    last = col == columns
    col[last], offset[last] = columns - 1, step
    v0, v1 = knots[col], knots[col + 1]
    values = np.full(complex.num_lattice_points, np.nan)
    values[ids] = v0 + (v1 - v0) * local[offset]
    return VertexField(complex, values, label=f"standard(seed={seed}, {axis})")
