"""Checks of the witness construction and the choice of block parameters."""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..bounds import invert_h
from ..errors import ContractError, DomainError, GuardError
from ..geometry import sq_len_equilateral
from ..levelset.complex import TriangleComplex
from ..levelset.engine import LevelQuery, build_front
from ..levelset.fields import VertexField, holder_audit as field_holder_audit
from ..models import AuditReport, DimensionCertificate, LevelCellCount, OptimizeResult
from .admissible import (
    SIDE_DIGITS,
    AdmissibleSet,
    Block,
    brute_force_rank,
    default_generators,
    delta_iota,
    flatten,
    format_block,
)
from .generators import LABELS, LATTICE_IDENTITY, LatticeMap
from .witness import TAIL_OF_CORNER, Witness, witness_field

logger = logging.getLogger(__name__)


def holder_constant(aset: AdmissibleSet, alpha: float) -> float:
    return (6.0 * aset.size / math.sqrt(3.0)) ** alpha


def holder_hypothesis_margin(aset: AdmissibleSet, alpha: float) -> float:
    """log2(#blocks) - (k* + w) alpha; the Hölder bound needs it non-negative."""
    return math.log2(aset.size) - (aset.k_star + aset.w) * alpha


def holder_audit(
    aset: AdmissibleSet,
    alpha: float,
    depth: int = 6,
    pair_budget: Optional[int] = None,
) -> AuditReport:
    """Hölder ratio of the witness over all vertex pairs at depth ``depth``."""
    margin = holder_hypothesis_margin(aset, alpha)
    if margin < -1e-12:
        raise ContractError(
            f"#blocks = {aset.size} < 2^((k*+w) alpha) for alpha={alpha}; "
            f"margin {margin:.6g}"
        )
    witness = Witness(aset)
    fld = witness_field(witness, TriangleComplex(depth))
    report = field_holder_audit(fld, holder_constant(aset, alpha), alpha, pair_budget)
    report.name = "witness_holder"
    report.details.update(
        {"k_star": aset.k_star, "w": aset.w, "depth": depth, "margin": margin}
    )
    return report


def diameter_floor_audit(aset: AdmissibleSet, m: int) -> AuditReport:
    """Every constituent triangle of an admissible m-chain has side >= 2^(-m(k*+w))."""
    floor_sq = Fraction(1, 1 << (2 * m * (aset.k_star + aset.w)))
    smallest: Optional[Fraction] = None
    checked = 0
    failing: List[str] = []
    for chain in itertools.product(aset.table, repeat=m):
        for a, b, _ in delta_iota(flatten(chain)):
            side = sq_len_equilateral(b - a).to_fraction()
            checked += 1
            smallest = side if smallest is None else min(smallest, side)
            if side < floor_sq:
                failing.append("|".join(format_block(x) for x in chain))
    return AuditReport(
        name="diameter_floor",
        passed=not failing,
        checked=checked,
        violations=len(failing),
        details={
            "m": m,
            "min_side": math.sqrt(smallest) if smallest is not None else None,
            "floor": 2.0 ** (-m * (aset.k_star + aset.w)),
        },
        samples=failing[:20],
    )


@lru_cache(maxsize=8)
def _level_field(k_star: int, w: int, depth: int) -> VertexField:
    return witness_field(Witness(AdmissibleSet(k_star, w)), TriangleComplex(depth))


def level_cell_count(aset: AdmissibleSet, r: float, n: int) -> LevelCellCount:
    """Cells of tau_{n(k*+w)} whose witness corner values straddle ``r``.

    The certifying chain is the n-block cylinder whose value interval holds ``r``.
    """
    exact = Fraction(r)
    if not 0 < exact < 1:
        raise GuardError(f"Level {r} outside (0, 1)")
    scaled = exact * aset.size**n
    if scaled.denominator == 1:
        raise GuardError(f"Level {r} is an endpoint of a level-{n} cylinder image")
    k = math.floor(scaled)
    chain = aset.unrank(k, n)
    depth = n * (aset.k_star + aset.w)
    fld = _level_field(aset.k_star, aset.w, depth)
    front = build_front(fld, depth, LevelQuery(exact))
    bound = 1 << (n * aset.w)
    if len(front) > bound:
        logger.warning(f"r={r} n={n}: {len(front)} cells exceed 2^(n w) = {bound}")
    return LevelCellCount(
        r=float(exact),
        n=n,
        depth=depth,
        count=len(front),
        bound=bound,
        rank=k,
        chain=[format_block(b) for b in chain],
        cylinder_triangles=len(delta_iota(flatten(chain))),
    )


def optimize_params(alpha: float, eps: float, max_k: int = 4096) -> OptimizeResult:
    """Smallest k* (then w) meeting the Hölder hypothesis within the target ratio."""
    if not 0 < alpha < 1 or eps <= 0:
        raise DomainError(f"Need 0 < alpha < 1 and eps > 0, got {alpha}, {eps}")
    t = float(invert_h("upper_witness", alpha))
    target = t / (1 + t) + eps
    if target >= 1:
        target = 1 - 1e-9

    for k_star in range(1, max_k + 1):
        top = math.floor(k_star * target / (1 - target))
        for w in range(1, min(top, k_star) + 1):
            aset = AdmissibleSet(k_star, w)
            margin = holder_hypothesis_margin(aset, alpha)
            if margin >= 0:
                logger.info(f"alpha={alpha} eps={eps}: k*={k_star} w={w}")
                return OptimizeResult(
                    alpha=alpha,
                    eps=eps,
                    kstar=k_star,
                    w=w,
                    size=aset.size,
                    ratio=w / (k_star + w),
                    target=target,
                    hypothesis_margin=margin,
                )
    raise DomainError(f"No block parameters up to k* = {max_k} for alpha={alpha}")


def dimension_certificate(k_star: int, w: int, alpha: float) -> DimensionCertificate:
    aset = AdmissibleSet(k_star, w)
    binom_bound = math.comb(k_star, w) << w
    return DimensionCertificate(
        kstar=k_star,
        w=w,
        alpha=alpha,
        size=aset.size,
        box_bound=w / (k_star + w),
        hypothesis_margin=holder_hypothesis_margin(aset, alpha),
        binom_lower=binom_bound,
        binom_ok=binom_bound <= aset.size,
    )


def _chains(depth: int) -> List[Tuple[Tuple[int, ...], LatticeMap]]:
    gens = default_generators()
    lattice = {label: LatticeMap.of(gens.maps[label]) for label in LABELS}
    level = [((), LATTICE_IDENTITY)]
    for _ in range(depth):
        level = [
            (digits + (label[0],), s.compose(lattice[label]))
            for digits, s in level
            for label in LABELS
        ]
    return level


def consistency_audit(aset: AdmissibleSet, depth: int = 4) -> AuditReport:
    """Points reached by several map chains of length ``depth`` get one value."""
    witness = Witness(aset)
    scale = 2 * depth
    values: Dict[Tuple[int, int], set] = defaultdict(set)
    for digits, s in _chains(depth):
        for corner in range(3):
            values[s.vertex(corner, scale)].add(
                witness.value(digits, TAIL_OF_CORNER[corner])
            )
    bad = [p for p, vals in values.items() if len(vals) > 1]
    return AuditReport(
        name="witness_consistency",
        passed=not bad,
        checked=len(values),
        violations=len(bad),
        details={"depth": depth},
        samples=[f"{p}: {sorted(str(v) for v in values[p])}" for p in bad[:10]],
    )


def ab_monotone_audit(aset: AdmissibleSet, depth: int = 6) -> AuditReport:
    """Values along side AB never decrease from B to A; 0 at B and 1 at A."""
    cx = TriangleComplex(depth)
    fld = witness_field(Witness(aset), cx)
    i = np.arange(cx.side + 1)
    ids = cx.vertex_id(i[::-1], np.zeros_like(i))
    vals = list(fld.at(ids))
    drops = [k for k in range(1, len(vals)) if vals[k] < vals[k - 1]]
    ends_ok = vals[0] == 0 and vals[-1] == 1
    return AuditReport(
        name="witness_ab_monotone",
        passed=not drops and ends_ok,
        checked=len(vals),
        violations=len(drops) + (0 if ends_ok else 1),
        details={"depth": depth},
        samples=[f"u={Fraction(int(i[::-1][k]), cx.side)}" for k in drops[:10]],
    )


def rank_oracle_audit(aset: AdmissibleSet, m: int) -> AuditReport:
    """Digit counting against sorting by the side order, all words of <= m blocks."""
    words = list(itertools.product(SIDE_DIGITS, repeat=aset.k_star))
    checked = 0
    failing: List[str] = []
    for length in range(1, m + 1):
        for chain in itertools.product(words, repeat=length):
            dp, _ = aset.rank(chain)
            checked += 1
            if dp != brute_force_rank(aset, chain):
                failing.append("|".join(format_block(b) for b in chain))
    return AuditReport(
        name="rank_oracle",
        passed=not failing,
        checked=checked,
        violations=len(failing),
        details={"k_star": aset.k_star, "w": aset.w, "m": m},
        samples=failing[:20],
    )


def cylinder_image_audit(aset: AdmissibleSet, m: int) -> AuditReport:
    """Vertex values of the k-th admissible m-chain span exactly [k, k+1] / size^m."""
    witness = Witness(aset)
    den = aset.size**m
    failing: List[str] = []
    chains = list(itertools.product(aset.table, repeat=m))
    for chain in chains:
        rank, _ = aset.rank(chain)
        vals = [
            witness.at_point(p) for tri in delta_iota(flatten(chain)) for p in tri
        ]
        if min(vals) != Fraction(rank, den) or max(vals) != Fraction(rank + 1, den):
            failing.append("|".join(format_block(b) for b in chain))
    return AuditReport(
        name="cylinder_image",
        passed=not failing,
        checked=len(chains),
        violations=len(failing),
        details={"m": m},
        samples=failing[:20],
    )


def constancy_audit(aset: AdmissibleSet, blocks: Sequence[Block]) -> AuditReport:
    """The witness takes one value on every vertex of an inadmissible cylinder."""
    if all(aset.contains(b) for b in blocks):
        raise ContractError("Constancy needs an inadmissible block")
    witness = Witness(aset)
    vals = {
        witness.at_point(p) for tri in delta_iota(flatten(blocks)) for p in tri
    }
    return AuditReport(
        name="witness_constancy",
        passed=len(vals) == 1,
        checked=1,
        violations=0 if len(vals) == 1 else 1,
        details={"values": sorted(str(v) for v in vals)},
    )
