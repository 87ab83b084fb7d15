"""
Admissible blocks, the side order on digit words and exact rank counting.

A word over {0, 2, 3} selects a union of triangles meeting side AB in a
segment; words are ordered by how close that segment lies to B.  Inside a
block the order is lexicographic with 0 < 2 < 3, reversed after every digit 0
(the maps of digit 0 send A to a corner on the far side).  Ranks are counted
digit by digit instead of by sorting, and the geometric order is kept as the
reference to check the counts against.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, List, Sequence, Tuple

from ..config import config
from ..errors import ContractError, ParameterError, ResourceBudgetError
from ..geometry import (
    VERTEX_A,
    VERTEX_B,
    VERTEX_C,
    AffineMap2,
    BaryPoint,
    Dyadic,
    Segment,
    ab_order_key,
)
from .generators import GenSystem, generators

logger = logging.getLogger(__name__)

Block = Tuple[int, ...]
Triangle = Tuple[BaryPoint, BaryPoint, BaryPoint]

SIDE_DIGITS = (0, 2, 3)
DIGIT_ORDER = {0: 0, 2: 1, 3: 2}


def parse_block(text: str) -> Block:
    block = tuple(int(ch) for ch in text.strip())
    if not block or any(d not in (0, 1, 2, 3) for d in block):
        raise ContractError(f"Blocks are words over 0-3, got {text!r}")
    return block


def parse_blocks(text: str) -> List[Block]:
    """Read ``"b1|b2|..."`` with each block a digit string."""
    return [parse_block(part) for part in text.split("|")]


def format_block(block: Block) -> str:
    return "".join(str(d) for d in block)


def flatten(blocks: Sequence[Block]) -> Block:
    return tuple(d for block in blocks for d in block)


def zero_parity(digits: Sequence[int]) -> bool:
    return sum(1 for d in digits if d == 0) % 2 == 1


def tail_count(length: int, budget: int) -> int:
    """Words over {0, 2, 3} of ``length`` with at most ``budget`` non-3 digits."""
    if budget < 0:
        return 0
    return sum(math.comb(length, i) << i for i in range(min(length, budget) + 1))


@dataclass(frozen=True)
class AdmissibleSet:
    """Blocks of length ``k_star`` over {0, 2, 3} with at most ``w`` non-3 digits."""

    k_star: int
    w: int

    def __post_init__(self) -> None:
        if self.k_star < 1 or self.w < 0:
            raise ParameterError(
                f"Need k* >= 1 and w >= 0, got {self.k_star}, {self.w}"
            )
        if self.size < 2:
            raise ParameterError(
                f"(k*, w) = ({self.k_star}, {self.w}) admits one block"
            )

    @property
    def size(self) -> int:
        return tail_count(self.k_star, self.w)

    def contains(self, block: Block) -> bool:
        return (
            len(block) == self.k_star
            and all(d in SIDE_DIGITS for d in block)
            and sum(1 for d in block if d != 3) <= self.w
        )

    def check_block(self, block: Block) -> None:
        if len(block) != self.k_star:
            raise ContractError(
                f"Block {format_block(block)} is not of length {self.k_star}"
            )

    def less_count_base(self, block: Block) -> int:
        """Admissible blocks strictly below ``block`` in the unreversed order."""
        if 1 in block:
            raise ContractError(f"Block {format_block(block)} contains digit 1")
        count, used, flipped = 0, 0, False
        for pos, digit in enumerate(block):
            remaining = self.k_star - pos - 1
            for c in SIDE_DIGITS:
                below = DIGIT_ORDER[c] > DIGIT_ORDER[digit] if flipped else (
                    DIGIT_ORDER[c] < DIGIT_ORDER[digit]
                )
                if below:
                    count += tail_count(remaining, self.w - used - (c != 3))
            used += digit != 3
            if used > self.w:
                break
            if digit == 0:
                flipped = not flipped
        return count

    def less_count(self, block: Block, reversed_: bool = False) -> int:
        self.check_block(block)
        base = self.less_count_base(block)
        if not reversed_:
            return base
        return self.size - base - int(self.contains(block))

    @cached_property
    def table(self) -> List[Block]:
        """Admissible blocks in increasing unreversed order."""
        if self.k_star > config.PHI_BLOCK_BUDGET:
            raise ResourceBudgetError(f"Block table for k* = {self.k_star} too large")
        words = itertools.product(SIDE_DIGITS, repeat=self.k_star)
        blocks = [b for b in words if self.contains(b)]
        return sorted(blocks, key=self.less_count_base)

    @cached_property
    def index(self) -> Dict[Block, int]:
        return {b: i for i, b in enumerate(self.table)}

    def rank(self, blocks: Sequence[Block]) -> Tuple[int, int]:
        """(admissible chains of equal length strictly below ``blocks``, blocks used).

        Counting stops after the first inadmissible block; the count is then
        scaled as if every later block were free.
        """
        if not blocks:
            raise ContractError("Rank needs at least one block")
        m = len(blocks)
        total, reversed_ = 0, False
        for j, block in enumerate(blocks):
            total = total * self.size + self.less_count(block, reversed_)
            if not self.contains(block):
                return total * self.size ** (m - j - 1), j + 1
            reversed_ ^= zero_parity(block)
        return total, m

    def unrank(self, k: int, m: int) -> List[Block]:
        """The admissible chain of ``m`` blocks with exactly ``k`` chains below it."""
        if not 0 <= k < self.size**m:
            raise ContractError(f"Rank {k} outside 0..{self.size ** m - 1}")
        chain: List[Block] = []
        reversed_ = False
        for j in range(m):
            q, k = divmod(k, self.size ** (m - j - 1))
            block = self.table[self.size - 1 - q] if reversed_ else self.table[q]
            chain.append(block)
            reversed_ ^= zero_parity(block)
        return chain


@lru_cache(maxsize=1)
def default_generators() -> GenSystem:
    return generators()


def corners_of(s: AffineMap2) -> Triangle:
    """Images of A, B and C."""
    return (s.apply(VERTEX_A), s.apply(VERTEX_B), s.apply(VERTEX_C))


def _branches(digit: int) -> Tuple[int, ...]:
    return (1,) if digit == 3 else (1, 2)


def delta_iota(digits: Sequence[int], gens: GenSystem | None = None) -> List[Triangle]:
    """Distinct triangles of the union over all branch choices for ``digits``."""
    gens = gens or default_generators()
    branching = sum(1 for d in digits if d != 3)
    if branching > config.PHI_BLOCK_BUDGET:
        raise ResourceBudgetError(
            f"{branching} branching digits exceed budget {config.PHI_BLOCK_BUDGET}"
        )
    maps = [AffineMap2.identity()]
    for digit in digits:
        maps = [s.compose(gens.map(digit, b)) for s in maps for b in _branches(digit)]

    seen, triangles = set(), []
    for s in maps:
        tri = corners_of(s)
        key = frozenset(tri)
        if key not in seen:
            seen.add(key)
            triangles.append(tri)
    return triangles


@lru_cache(maxsize=65536)
def ab_segment(digits: Tuple[int, ...]) -> Tuple[Dyadic, Dyadic]:
    """Distances from B of the two ends of the union's intersection with side AB."""
    if 1 in digits:
        raise ContractError(
            f"Word {format_block(digits)} has digit 1; it misses side AB"
        )
    gens = default_generators()
    # keep only images with an edge on AB; no other image has a descendant there
    maps = [AffineMap2.identity()]
    for digit in digits:
        maps = [
            t
            for s in maps
            for b in _branches(digit)
            for t in (s.compose(gens.map(digit, b)),)
            if _edge_on_ab(t)
        ]
    points = [p for s in maps for p in corners_of(s) if p.on_ab()]
    if not points:
        raise ContractError(f"Word {format_block(digits)} does not meet side AB")
    side = Segment(min(points, key=ab_order_key), max(points, key=ab_order_key))
    return side.ab_range()


def _edge_on_ab(s: AffineMap2) -> bool:
    return sum(1 for p in corners_of(s) if p.on_ab()) >= 2


def compare_lt4(a: Sequence[int], b: Sequence[int]) -> int:
    """-1 if the side segment of ``a`` lies closer to B than that of ``b``, else 1."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    lo_a, hi_a = ab_segment(a)
    lo_b, hi_b = ab_segment(b)
    return (lo_a + hi_a).compare(lo_b + hi_b)


def brute_force_rank(aset: AdmissibleSet, blocks: Sequence[Block]) -> int:
    """Count chains of admissible blocks below ``blocks`` with the geometric order."""
    target = flatten(blocks)
    return sum(
        1
        for chain in itertools.product(aset.table, repeat=len(blocks))
        if compare_lt4(flatten(chain), target) < 0
    )
