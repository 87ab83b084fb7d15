"""
Conductivity scheme on the Sierpiński triangle.

A level-``l`` triangle is addressed by ``l`` digits in {0, 1, 2}; digit ``d``
selects the child that contains corner ``d`` (0 = A, 1 = B, 2 = C) of its parent.
Addresses are packed into base-3 integer codes so that whole scheme levels are
numpy arrays.  Scheme level 1 is the three level-1 triangles with conductivity
1; every node ``T`` contributes to the next level its child of the same last
digit (same conductivity) and the six grandchildren below its two other
children (half the conductivity).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .config import config
from .errors import ContractError, ResourceBudgetError
from .geometry import TRIANGLE, BaryPoint
from .models import AuditReport, HistogramReport

logger = logging.getLogger(__name__)

# key = code * LEVEL_SLOTS + level identifies a triangle of any level
LEVEL_SLOTS = 64


@dataclass(frozen=True)
class TriAddress:
    """Digits of a triangle in the Sierpiński construction."""

    digits: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(d not in (0, 1, 2) for d in self.digits):
            raise ContractError(f"Address digits must lie in {{0,1,2}}: {self.digits}")

    @classmethod
    def from_code(cls, code: int, level: int) -> TriAddress:
        digits = []
        for _ in range(level):
            code, d = divmod(code, 3)
            digits.append(d)
        return cls(tuple(reversed(digits)))

    @classmethod
    def parse(cls, text: str) -> TriAddress:
        text = text.strip()
        return cls(tuple(int(d) for d in text.split(",")) if text else ())

    @property
    def level(self) -> int:
        return len(self.digits)

    @property
    def code(self) -> int:
        code = 0
        for d in self.digits:
            code = code * 3 + d
        return code

    def child(self, digit: int) -> TriAddress:
        return TriAddress(self.digits + (digit,))

    def parent(self) -> TriAddress:
        if not self.digits:
            raise ContractError("The root triangle has no parent")
        return TriAddress(self.digits[:-1])

    def vertices(self) -> Tuple[BaryPoint, BaryPoint, BaryPoint]:
        """Exact corners, indexed like the root corners A, B, C."""
        corners = list(TRIANGLE)
        for d in self.digits:
            keep = corners[d]
            corners = [keep if j == d else keep.midpoint(corners[j]) for j in range(3)]
        return corners[0], corners[1], corners[2]

    def __str__(self) -> str:
        return ",".join(str(d) for d in self.digits)


@dataclass(frozen=True)
class SchemeNode:
    """A member of scheme level ``scheme_index`` with conductivity 2**-kexp."""

    address: TriAddress
    scheme_index: int
    kexp: int

    @property
    def kappa(self) -> Fraction:
        return Fraction(1, 1 << self.kexp)


@dataclass
class SchemeLevel:
    """All nodes of one scheme level as parallel arrays."""

    n: int
    codes: np.ndarray
    levels: np.ndarray
    kexps: np.ndarray

    def __len__(self) -> int:
        return int(self.codes.shape[0])


@dataclass
class ConductivityAtlas:
    """Scheme levels 1..max_n; ``complete`` is False when a budget cut it short."""

    levels: Dict[int, SchemeLevel] = field(default_factory=dict)
    complete: bool = True
    requested_n: int = 0
    _lookup: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @property
    def max_n(self) -> int:
        return max(self.levels) if self.levels else 0

    def size(self, n: int) -> int:
        return len(self.level(n))

    def level(self, n: int) -> SchemeLevel:
        if n not in self.levels:
            raise ContractError(f"Scheme level {n} not in atlas (max {self.max_n})")
        return self.levels[n]

    def nodes(self, n: int) -> Iterator[SchemeNode]:
        lvl = self.level(n)
        for code, level, kexp in zip(
            lvl.codes.tolist(), lvl.levels.tolist(), lvl.kexps.tolist()
        ):
            yield SchemeNode(TriAddress.from_code(code, level), n, kexp)

    def lookup_kexp(self, level: int, codes: np.ndarray) -> np.ndarray:
        """kexp of the given level-``level`` triangles, -1 where not a scheme node."""
        if self._lookup is None:
            keys, kexps = [], []
            for lvl in self.levels.values():
                keys.append(lvl.codes * LEVEL_SLOTS + lvl.levels)
                kexps.append(lvl.kexps)
            all_keys = np.concatenate(keys)
            order = np.argsort(all_keys, kind="stable")
            self._lookup = (all_keys[order], np.concatenate(kexps)[order])
        sorted_keys, sorted_kexps = self._lookup
        query = np.asarray(codes, dtype=np.int64) * LEVEL_SLOTS + level
        pos = np.searchsorted(sorted_keys, query)
        pos = np.minimum(pos, sorted_keys.shape[0] - 1)
        found = sorted_keys[pos] == query
        return np.where(found, sorted_kexps[pos], -1)


def _first_level() -> SchemeLevel:
    return SchemeLevel(
        n=1,
        codes=np.arange(3, dtype=np.int64),
        levels=np.ones(3, dtype=np.int64),
        kexps=np.zeros(3, dtype=np.int64),
    )


def _next_level(prev: SchemeLevel) -> SchemeLevel:
    codes, levels, kexps = prev.codes, prev.levels, prev.kexps
    last = codes % 3

    same_codes = codes * 3 + last

    # the two other children, each split into its three children
    others = np.stack([(last + 1) % 3, (last + 2) % 3], axis=1)
    grand = (
        codes[:, None, None] * 9
        + 3 * others[:, :, None]
        + np.arange(3, dtype=np.int64)[None, None, :]
    ).reshape(-1)

    return SchemeLevel(
        n=prev.n + 1,
        codes=np.concatenate([same_codes, grand]),
        levels=np.concatenate([levels + 1, np.repeat(levels + 2, 6)]),
        kexps=np.concatenate([kexps, np.repeat(kexps + 1, 6)]),
    )


def _checkpoint_path(cache_dir: str, n: int) -> str:
    return os.path.join(cache_dir, f"scheme_level_{n:02d}.npz")


def _save_checkpoint(cache_dir: str, lvl: SchemeLevel) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    np.savez(
        _checkpoint_path(cache_dir, lvl.n),
        codes=lvl.codes,
        levels=lvl.levels,
        kexps=lvl.kexps,
    )


def _load_checkpoints(cache_dir: str, max_n: int) -> List[SchemeLevel]:
    loaded: List[SchemeLevel] = []
    for n in range(1, max_n + 1):
        path = _checkpoint_path(cache_dir, n)
        if not os.path.exists(path):
            break
        with np.load(path) as data:
            loaded.append(
                SchemeLevel(n, data["codes"], data["levels"], data["kexps"])
            )
    if loaded:
        logger.info(f"Resumed scheme levels 1..{len(loaded)} from {cache_dir}")
    return loaded


def expand_scheme(
    max_n: int,
    budget: Optional[int] = None,
    cache_dir: Optional[str] = None,
) -> ConductivityAtlas:
    """Enumerate levels 1..max_n, stopping once ``budget`` nodes are stored."""
    if max_n < 1:
        raise ContractError(f"max_n must be at least 1, got {max_n}")
    budget = config.SCHEME_NODE_BUDGET if budget is None else budget

    if 2 * max_n - 1 > 35:
        raise ResourceBudgetError(
            f"Scheme level {max_n} needs addresses beyond int64 codes"
        )

    atlas = ConductivityAtlas(requested_n=max_n)
    levels = _load_checkpoints(cache_dir, max_n) if cache_dir else []
    if not levels:
        levels = [_first_level()]
        if cache_dir:
            _save_checkpoint(cache_dir, levels[0])

    stored = 0
    for lvl in levels:
        stored += len(lvl)
        atlas.levels[lvl.n] = lvl

    current = levels[-1]
    while current.n < max_n:
        if stored + 7 * len(current) > budget:
            logger.warning(
                f"Node budget {budget} reached at scheme level {current.n}; "
                "atlas is incomplete"
            )
            atlas.complete = False
            break
        current = _next_level(current)
        atlas.levels[current.n] = current
        stored += len(current)
        logger.info(f"Scheme level {current.n}: {len(current)} nodes")
        if cache_dir:
            _save_checkpoint(cache_dir, current)

    return atlas


def verify_kappa_lemma(atlas: ConductivityAtlas) -> AuditReport:
    """Check kexp == level - n for every node of every stored scheme level."""
    checked = 0
    violations: List[str] = []
    for n, lvl in sorted(atlas.levels.items()):
        bad = np.nonzero(lvl.kexps != lvl.levels - n)[0]
        checked += len(lvl)
        for idx in bad[:20].tolist():
            address = TriAddress.from_code(int(lvl.codes[idx]), int(lvl.levels[idx]))
            violations.append(
                f"n={n} address={address} kexp={int(lvl.kexps[idx])}"
            )
        if bad.size:
            logger.error(f"Conductivity exponent mismatch on {bad.size} nodes at n={n}")

    return AuditReport(
        name="kappa_lemma",
        passed=not violations and atlas.complete,
        checked=checked,
        violations=len(violations),
        details={"max_n": atlas.max_n, "complete": atlas.complete},
        samples=violations,
    )


def closed_form_histogram(n: int) -> List[int]:
    """Per-root counts by kexp from counts[n+1][k] = counts[n][k] + 6 counts[n][k-1]."""
    if n < 1:
        raise ContractError(f"n must be at least 1, got {n}")
    counts = [1]
    for _ in range(n - 1):
        counts = [
            (counts[k] if k < len(counts) else 0)
            + (6 * counts[k - 1] if k >= 1 else 0)
            for k in range(len(counts) + 1)
        ]
    return counts


def histogram(atlas: ConductivityAtlas, n: int) -> HistogramReport:
    """Counts by conductivity exponent for scheme level ``n`` against closed forms."""
    lvl = atlas.level(n)
    counts = np.bincount(lvl.kexps, minlength=n)
    roots = lvl.codes // (3 ** (lvl.levels - 1))

    per_root = {}
    for root in range(3):
        root_counts = np.bincount(lvl.kexps[roots == root], minlength=n)
        per_root[root] = {k: int(c) for k, c in enumerate(root_counts.tolist()) if c}

    predicted = {k: math.comb(n - 1, k) * 6**k for k in range(n)}
    recursion = dict(enumerate(closed_form_histogram(n)))
    total = int(counts.sum())
    matches = (
        all(per_root[root] == predicted for root in range(3))
        and predicted == recursion
        and total == 3 * 7 ** (n - 1)
    )

    return HistogramReport(
        n=n,
        counts={k: int(c) for k, c in enumerate(counts.tolist()) if c},
        per_root=per_root,
        per_root_prediction=predicted,
        total=total,
        total_prediction=3 * 7 ** (n - 1),
        matches=matches,
    )


def cover_audit(atlas: ConductivityAtlas, n: int) -> AuditReport:
    """Scheme level ``n`` must tile the triangle: an antichain with full cover."""
    lvl = atlas.level(n)
    depth = 2 * n - 1
    scale = 3 ** (depth - lvl.levels)
    starts = lvl.codes * scale
    ends = (lvl.codes + 1) * scale

    order = np.argsort(starts, kind="stable")
    starts, ends = starts[order], ends[order]

    overlaps = int(np.count_nonzero(starts[1:] < ends[:-1]))
    gaps = int(np.count_nonzero(starts[1:] > ends[:-1]))
    covers = bool(starts[0] == 0 and ends[-1] == 3**depth)
    passed = overlaps == 0 and gaps == 0 and covers

    if not passed:
        logger.error(
            f"Cover audit failed at n={n}: overlaps={overlaps} gaps={gaps} "
            f"covers_ends={covers}"
        )

    return AuditReport(
        name="scheme_cover",
        passed=passed,
        checked=len(lvl),
        violations=overlaps + gaps + (0 if covers else 1),
        details={"n": n, "overlaps": overlaps, "gaps": gaps, "depth": depth},
    )


def kappa_of(address: TriAddress) -> Tuple[Optional[int], int]:
    """(scheme index or None, kexp) of any triangle of level >= 1.

    Triangles strictly between two scheme levels (the non-matching children of a
    scheme node) get the halved conductivity of their own children.
    """
    if address.level < 1:
        raise ContractError("The root triangle is not part of the scheme")
    in_scheme, kexp, last = True, 0, address.digits[0]
    for d in address.digits[1:]:
        if in_scheme and d != last:
            in_scheme, kexp = False, kexp + 1
        else:
            in_scheme = True
        last = d
    return (address.level - kexp if in_scheme else None), kexp


def geometric_same_child(address: TriAddress) -> int:
    """Digit of the unique child sharing a vertex with the parent of ``address``."""
    parent_vertices = set(address.parent().vertices())
    hits = [
        d
        for d in range(3)
        if parent_vertices.intersection(address.child(d).vertices())
    ]
    if len(hits) != 1:
        raise ContractError(f"Expected one child touching the parent of {address}")
    return hits[0]


def geometric_child_audit(atlas: ConductivityAtlas, max_level: int = 6) -> AuditReport:
    """Compare the digit rule for the same-conductivity child with vertex incidence."""
    checked = 0
    violations: List[str] = []
    for n in sorted(atlas.levels):
        lvl = atlas.levels[n]
        mask = lvl.levels < max_level
        for code, level in zip(lvl.codes[mask].tolist(), lvl.levels[mask].tolist()):
            address = TriAddress.from_code(code, level)
            checked += 1
            if geometric_same_child(address) != address.digits[-1]:
                violations.append(str(address))

    return AuditReport(
        name="same_child_geometry",
        passed=not violations,
        checked=checked,
        violations=len(violations),
        details={"max_level": max_level},
        samples=violations[:20],
    )
