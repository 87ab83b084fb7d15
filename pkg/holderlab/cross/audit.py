"""Conductivity of level-set fronts on the cross construction."""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ContractError
from ..levelset.engine import (
    LevelQuery,
    build_front,
    descend,
    merge_reports,
    sample_queries,
)
from ..levelset.fields import VertexField
from ..models import AuditReport
from ..parallel import ordered_map
from .approx import random_standard_field
from .complex import CrossComplex
from .model import conductivity_table

logger = logging.getLogger(__name__)


def _inverse(total: Optional[Fraction]) -> Optional[float]:
    if total is None:
        return None
    return float(1 / total) if total else float("inf")


def conductivity_audit(
    field: VertexField, query: LevelQuery, L: int, depth: Optional[int] = None
) -> AuditReport:
    """For each front square Q and k steps down, the descendants carry kappa(Q).

    Conductivities are compared relative to Q, so only the factors of the steps
    below Q enter.
    """
    cx = field.complex
    if not isinstance(cx, CrossComplex):
        raise ContractError("Conductivity audit needs a field on the cross complex")
    depth = cx.depth if depth is None else depth
    cx.check_level(depth)
    factors = conductivity_table(cx.model, L).factor_array()

    checked = violations = 0
    worst: Optional[Fraction] = None
    samples: List[str] = []
    for level in range(depth):
        for cell in build_front(field, level, query).cells.tolist():
            tree = descend(field, level, cell, query, depth - level)
            rel = np.array([Fraction(1)], dtype=object)
            for k in range(1, tree.depth + 1):
                digits = tree.levels[k] % cx.branching
                rel = rel[tree.parents[k]] * factors[digits]
                total = sum(rel.tolist(), Fraction(0))
                checked += 1
                worst = total if worst is None else min(worst, total)
                if total < 1:
                    violations += 1
                    if len(samples) < 20:
                        samples.append(f"level={level} cell={cell} k={k} sum={total}")

    return AuditReport(
        name="cross_conductivity",
        passed=violations == 0,
        checked=checked,
        violations=violations,
        max_ratio=_inverse(worst),
        details={"r": float(query.r), "L": L, "m": cx.m, "depth": depth},
        samples=samples,
    )


def conductivity_sweep(
    m: int,
    L: int,
    depth: int,
    seeds: Sequence[int],
    queries_per_field: int = 4,
    workers: Optional[int] = None,
) -> AuditReport:
    """Conductivity audit over random standard fields, one work item per seed."""
    cx = CrossComplex(m, depth)

    def run(seed: int) -> AuditReport:
        fld = random_standard_field(cx, seed)
        reports = [
            conductivity_audit(fld, q, L)
            for q in sample_queries(fld, queries_per_field, seed)
        ]
        return merge_reports("cross_conductivity", reports)

    report = merge_reports(
        "cross_conductivity_sweep", ordered_map(run, list(seeds), workers)
    )
    report.details.update({"m": m, "L": L, "depth": depth})
    logger.info(
        f"Cross conductivity m={m} L={L} depth={depth}: "
        f"{report.violations} violations over {report.checked} checks"
    )
    return report
