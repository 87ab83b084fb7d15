"""
Fronts, r-descendant trees and the recursive level measure.

A cell is in the front of ``r`` when two of its corners satisfy
``f(v) < r < f(v')``.  The engine only talks to a :class:`CellComplex`, so the
same code serves the triangle and the cross constructions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from ..config import config
from ..errors import ContractError, GuardError
from ..models import AuditReport, FrontSlopeReport, FrontStatsRow
from ..parallel import item_rng, ordered_map
from ..scheme import ConductivityAtlas
from .complex import CellComplex, TriangleComplex
from .fields import VertexField, random_holder_field, random_vertex_values

logger = logging.getLogger(__name__)

Number = Union[float, Fraction]


@dataclass(frozen=True)
class LevelQuery:
    """Level value ``r`` with the minimal separation from every vertex value."""

    r: Number
    guard: float = config.FLOAT_GUARD


@dataclass
class CellFront:
    level: int
    cells: np.ndarray

    def __len__(self) -> int:
        return int(self.cells.shape[0])


@dataclass
class DescendantTree:
    """Straddling descendants of one cell; ``parents[i]`` indexes ``levels[i - 1]``."""

    complex: CellComplex
    root_level: int
    levels: List[np.ndarray]
    parents: List[np.ndarray]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def is_complete(self) -> bool:
        return all(lvl.shape[0] > 0 for lvl in self.levels)


@dataclass
class LevelMeasure:
    """Node masses stored as integer denominators: mu = 1 / den."""

    tree: DescendantTree
    denominators: List[np.ndarray] = field(default_factory=list)

    def mu(self, index: int) -> np.ndarray:
        return 1.0 / self.denominators[index].astype(float)

    def exact_mu(self, index: int) -> List[Fraction]:
        return [Fraction(1, int(d)) for d in self.denominators[index].tolist()]

    def exact_total(self, index: int) -> Fraction:
        return sum(self.exact_mu(index), Fraction(0))


def _as_level(field: VertexField, r: Number) -> Number:
    return Fraction(r) if field.exact else float(r)


def check_query(field: VertexField, query: LevelQuery) -> None:
    """Reject level values at a vertex value (within ``guard`` in float mode)."""
    values = field.vertex_values()
    if field.exact:
        r = Fraction(query.r)
        if any(v == r for v in values):
            raise GuardError(f"Level {r} is a vertex value of {field.label}")
        return
    gap = float(np.min(np.abs(values - float(query.r))))
    if gap < query.guard:
        raise GuardError(
            f"Level {query.r} within {gap:.3g} of a vertex value "
            f"(guard {query.guard:.3g})"
        )


def cell_ranges(
    field: VertexField, level: int, cells: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Smallest and largest corner value of each cell."""
    values = field.at(field.complex.corners(level, cells))
    return values.min(axis=1), values.max(axis=1)


def straddles(
    field: VertexField, level: int, cells: np.ndarray, r: Number
) -> np.ndarray:
    lo, hi = cell_ranges(field, level, cells)
    return np.asarray((lo < r) & (hi > r), dtype=bool)


def build_front(field: VertexField, n: int, query: LevelQuery) -> CellFront:
    """Level-``n`` cells whose corner values strictly straddle ``query.r``."""
    field.complex.check_level(n)
    check_query(field, query)
    cells = field.complex.cells(n)
    mask = straddles(field, n, cells, _as_level(field, query.r))
    return CellFront(n, cells[mask])


def _covers(
    parent_lo: np.ndarray,
    parent_hi: np.ndarray,
    child_lo: np.ndarray,
    child_hi: np.ndarray,
) -> np.ndarray:
    """Whether the child intervals (last axis) cover the parent interval."""
    order = np.argsort(child_lo, axis=-1)
    lo = np.take_along_axis(child_lo, order, axis=-1)
    hi = np.maximum.accumulate(np.take_along_axis(child_hi, order, axis=-1), axis=-1)
    gapless = np.all(lo[..., 1:] <= hi[..., :-1], axis=-1)
    return gapless & (lo[..., 0] <= parent_lo) & (hi[..., -1] >= parent_hi)


def cover_audit(
    field: VertexField, level: int, cells: Optional[np.ndarray] = None
) -> AuditReport:
    """Children value intervals must cover the parent value interval."""
    cx = field.complex
    if level >= cx.depth:
        raise ContractError(f"Cover audit needs level < depth {cx.depth}, got {level}")
    flt = field.as_float()
    cells = cx.cells(level) if cells is None else np.asarray(cells, dtype=np.int64)
    plo, phi = cell_ranges(flt, level, cells)
    clo, chi = cell_ranges(flt, level + 1, cx.children(cells))
    shape = (cells.shape[0], cx.branching)
    ok = _covers(plo, phi, clo.reshape(shape), chi.reshape(shape))
    bad = cells[~ok]
    return AuditReport(
        name="cover",
        passed=bad.size == 0,
        checked=int(cells.shape[0]),
        violations=int(bad.size),
        details={"level": level, "complex": cx.name},
        samples=[str(c) for c in bad[:20].tolist()],
    )


def random_cover_audit(complex: CellComplex, trials: int, seed: int) -> AuditReport:
    """Cover audit of the root cell under independent uniform vertex values."""
    if complex.depth < 1:
        raise ContractError("Random cover audit needs depth >= 1")
    values = random_vertex_values(complex, trials, item_rng(seed, 0))
    root = np.zeros(1, dtype=np.int64)
    pv = values[:, complex.corners(0, root)[0]]
    cv = values[:, complex.corners(1, complex.children(root))]
    ok = _covers(pv.min(axis=1), pv.max(axis=1), cv.min(axis=2), cv.max(axis=2))
    return AuditReport(
        name="random_cover",
        passed=bool(np.all(ok)),
        checked=trials,
        violations=int(np.count_nonzero(~ok)),
        details={"complex": complex.name, "seed": seed},
    )


def descend(
    field: VertexField,
    root_level: int,
    root_cell: int,
    query: LevelQuery,
    depth: int,
) -> DescendantTree:
    """All r-descendants of ``root_cell`` down ``depth`` further levels."""
    cx = field.complex
    cx.check_level(root_level + depth)
    check_query(field, query)
    r = _as_level(field, query.r)
    root = np.array([root_cell], dtype=np.int64)
    if not straddles(field, root_level, root, r)[0]:
        raise ContractError(
            f"Cell {root_cell} at level {root_level} is not in the front of {query.r}"
        )

    levels = [root]
    parents = [np.zeros(0, dtype=np.int64)]
    for step in range(1, depth + 1):
        prev = levels[-1]
        children = cx.children(prev)
        mask = straddles(field, root_level + step, children, r)
        levels.append(children[mask])
        parents.append(np.repeat(np.arange(prev.shape[0]), cx.branching)[mask])
        if not mask.any():
            logger.warning(f"Empty r-descendant level {root_level + step}")
            break
    return DescendantTree(cx, root_level, levels, parents)


def build_measure(tree: DescendantTree) -> LevelMeasure:
    """mu(root) = 1 and each node splits its mass evenly among its tree children."""
    if not tree.is_complete():
        raise ContractError("Descendant tree has an empty level; query too deep")
    big = tree.complex.branching ** max(tree.depth, 1) >= 2**62
    dtype = object if big else np.int64
    dens = [np.ones(1, dtype=dtype)]
    for parents in tree.parents[1:]:
        siblings = np.bincount(parents, minlength=dens[-1].shape[0])[parents]
        dens.append(dens[-1][parents] * siblings.astype(dtype))
    return LevelMeasure(tree, dens)


def measure_records(measure: LevelMeasure) -> Iterator[Dict[str, object]]:
    """One record per tree node: level, cell and mass."""
    tree = measure.tree
    for index, cells in enumerate(tree.levels):
        mu = measure.exact_mu(index)
        for cell, mass in zip(cells.tolist(), mu):
            yield {"level": tree.root_level + index, "cell": cell, "mu": str(mass)}


def mu_kappa_audit(
    field: VertexField, query: LevelQuery, atlas: ConductivityAtlas
) -> AuditReport:
    """mu(T) <= kappa(T) on every scheme node of the tree grown from the root."""
    cx = field.complex
    if not isinstance(cx, TriangleComplex):
        raise ContractError("Conductivities exist only on the triangle complex")
    if atlas.max_n < cx.depth:
        raise ContractError(
            f"Atlas reaches scheme level {atlas.max_n}, need {cx.depth}"
        )
    tree = descend(field, 0, 0, query, cx.depth)
    measure = build_measure(tree)

    checked, violations, worst = 1, 0, 1.0
    samples: List[str] = []
    for index in range(1, tree.depth + 1):
        kexp = atlas.lookup_kexp(index, tree.levels[index])
        hit = kexp >= 0
        if not hit.any():
            continue
        dens = measure.denominators[index][hit]
        kexp = kexp[hit]
        # mu <= kappa  <=>  den >= 2^kexp
        bad = np.array(
            [int(d) < (1 << int(k)) for d, k in zip(dens.tolist(), kexp.tolist())]
        )
        ratios = np.exp2(kexp.astype(float)) / dens.astype(float)
        worst = max(worst, float(ratios.max()))
        checked += int(hit.sum())
        violations += int(bad.sum())
        for cell in tree.levels[index][hit][bad][:5].tolist():
            samples.append(f"level={index} cell={cell}")

    return AuditReport(
        name="mu_kappa",
        passed=violations == 0,
        checked=checked,
        violations=violations,
        max_ratio=worst,
        details={"r": float(query.r), "depth": cx.depth},
        samples=samples,
    )


def merge_reports(name: str, reports: Sequence[AuditReport]) -> AuditReport:
    ratios = [r.max_ratio for r in reports if r.max_ratio is not None]
    return AuditReport(
        name=name,
        passed=all(r.passed for r in reports),
        checked=sum(r.checked for r in reports),
        violations=sum(r.violations for r in reports),
        max_ratio=max(ratios) if ratios else None,
        details={"runs": len(reports)},
        samples=[s for r in reports for s in r.samples][:20],
    )


def mu_kappa_sweep(
    atlas: ConductivityAtlas,
    depth: int,
    seeds: Sequence[int],
    queries_per_field: int = 4,
    c: float = 1.0,
    alpha: float = 0.5,
    workers: Optional[int] = None,
) -> AuditReport:
    """mu/kappa audit over random Hölder fields, one work item per seed."""
    cx = TriangleComplex(depth)

    def run(seed: int) -> AuditReport:
        fld = random_holder_field(cx, seed, c=c, alpha=alpha)
        reports = [
            mu_kappa_audit(fld, q, atlas)
            for q in sample_queries(fld, queries_per_field, seed)
        ]
        return merge_reports("mu_kappa", reports)

    return merge_reports("mu_kappa_sweep", ordered_map(run, list(seeds), workers))


def sample_queries(
    field: VertexField,
    count: int,
    seed: int,
    guard: Optional[float] = None,
) -> List[LevelQuery]:
    """Half a uniform grid, half uniform draws over the root value range; guarded."""
    guard = config.FLOAT_GUARD if guard is None else guard
    flt = field.as_float()
    lo, hi = cell_ranges(flt, 0, np.zeros(1, dtype=np.int64))
    lo, hi = float(lo[0]), float(hi[0])
    if hi <= lo or count <= 0:
        return []

    grid_count = count // 2
    grid = lo + (hi - lo) * (np.arange(grid_count) + 0.5) / max(grid_count, 1)
    draws = item_rng(seed, 1).uniform(lo, hi, size=count - grid_count)
    values = flt.vertex_values()

    queries = []
    for r in np.concatenate([grid, draws]).tolist():
        if float(np.min(np.abs(values - r))) >= guard:
            queries.append(LevelQuery(r, guard))
    return queries


def _scheme_ranges(
    field: VertexField, atlas: ConductivityAtlas, n: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(kexps, corner lo, corner hi, full-depth lo, full-depth hi) per scheme-n node."""
    cx = field.complex
    lvl = atlas.level(n)
    D = cx.depth

    corner_lo = np.empty(len(lvl))
    corner_hi = np.empty(len(lvl))
    for level in np.unique(lvl.levels).tolist():
        sel = lvl.levels == level
        corner_lo[sel], corner_hi[sel] = cell_ranges(field, level, lvl.codes[sel])

    fine_lo, fine_hi = cell_ranges(field, D, cx.cells(D))
    starts = lvl.codes * 3 ** (D - lvl.levels)
    order = np.argsort(starts, kind="stable")
    full_lo = np.empty(len(lvl))
    full_hi = np.empty(len(lvl))
    full_lo[order] = np.minimum.reduceat(fine_lo, starts[order])
    full_hi[order] = np.maximum.reduceat(fine_hi, starts[order])
    return lvl.kexps, corner_lo, corner_hi, full_lo, full_hi


def front_stats(
    field: VertexField,
    query: LevelQuery,
    atlas: ConductivityAtlas,
    d1: float,
    levels: Optional[Sequence[int]] = None,
) -> List[FrontStatsRow]:
    """Front sizes and conductivity sums of scheme levels n with 2n - 1 <= depth."""
    cx = field.complex
    if not isinstance(cx, TriangleComplex):
        raise ContractError("Front statistics need the triangle complex")
    check_query(field, query)
    flt = field.as_float()
    r = float(query.r)
    top = min((cx.depth + 1) // 2, atlas.max_n)
    levels = list(range(1, top + 1)) if levels is None else list(levels)

    rows = []
    for n in levels:
        if 2 * n - 1 > cx.depth or n > atlas.max_n:
            raise ContractError(f"Scheme level {n} needs depth {2 * n - 1}")
        kexps, lo, hi, full_lo, full_hi = _scheme_ranges(flt, atlas, n)
        kappa = np.exp2(-kexps.astype(float))
        front = (lo < r) & (hi > r)
        high = kexps <= n * d1

        front_size = int(front.sum())
        highcond_mass = float(kappa[front & high].sum())
        cert = None
        if highcond_mass < 0.5:
            cert = front_size >= 2.0 ** (n * d1 - 1)
            if not cert:
                logger.warning(f"Low-box certificate failed at n={n} for r={r}")

        rows.append(
            FrontStatsRow(
                n=n,
                front_size=front_size,
                tau_front_size=len(build_front(flt, n, query)),
                max_kappa=float(kappa[front].max()) if front_size else 0.0,
                highcond_mass=highcond_mass,
                image_mass_bound=float((full_hi - full_lo)[high].sum()),
                kappa_total=float(kappa[front].sum()),
                cert_lowbox=cert,
                slope=math.log2(front_size) / n if front_size else None,
            )
        )
    return rows


def front_slope(
    field: VertexField, query: LevelQuery, levels: Optional[Sequence[int]] = None
) -> FrontSlopeReport:
    """log2 #G_n(r) / n per level and the fitted growth exponent."""
    levels = list(range(1, field.depth + 1)) if levels is None else list(levels)
    counts = [len(build_front(field, n, query)) for n in levels]
    slopes = [math.log2(c) / n if c and n else None for n, c in zip(levels, counts)]

    fit = None
    pts = [(n, math.log2(c)) for n, c in zip(levels, counts) if c]
    if len(pts) >= 2:
        xs, ys = zip(*pts)
        fit = float(linregress(xs, ys).slope)
    return FrontSlopeReport(levels=levels, counts=counts, slopes=slopes, fit_slope=fit)
