"""
The Cantor-type function of the cross construction.

With ``c = 2**(m-1) - 1`` the set A holds the points of [0, 1] whose base
``2**m`` digits are all ``c`` or ``c + 1``; on A the function reads those
digits as binary digits.  It is extended to [0, 1] by constants on the gaps,
so a gap digit below ``c`` stops at the running sum and one above ``c + 1``
stops at the running sum plus everything the remaining digits could add.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from ..config import config
from ..errors import ContractError, DomainError, GuardError, ResourceBudgetError
from ..levelset.fields import max_holder_ratio
from .model import build_cross

logger = logging.getLogger(__name__)

SECTION_MAX_N = 10

_DIGITS = re.compile(r"^\s*([0-9,\s]*?)\s*(?:\(([0-9,\s]+)\))?\s*$")


@dataclass(frozen=True)
class DigitExpansion:
    """``0.prefix (period)`` in base ``2**m``; an empty period means trailing zeros."""

    m: int
    prefix: Tuple[int, ...]
    period: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        base = 1 << self.m
        bad = [d for d in self.prefix + self.period if not 0 <= d < base]
        if bad:
            raise DomainError(f"Digits {bad} outside 0..{base - 1}")

    def value(self) -> Fraction:
        base = 1 << self.m
        x = Fraction(0)
        for j, d in enumerate(self.prefix, start=1):
            x += Fraction(d, base**j)
        if self.period:
            P = len(self.period)
            rep = sum(d * base ** (P - 1 - t) for t, d in enumerate(self.period))
            x += Fraction(rep, (base**P - 1) * base ** len(self.prefix))
        return x


def _split(text: str) -> List[int]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    return [int(p) for p in parts]


def parse_digits(m: int, text: str) -> DigitExpansion:
    """Read ``"d1,d2,...(p1,p2)"``; the parenthesised group repeats forever."""
    match = _DIGITS.match(text)
    if match is None:
        raise DomainError(f"Cannot read digit string {text!r}")
    head, group = match.groups()
    return DigitExpansion(m, tuple(_split(head or "")), tuple(_split(group or "")))


def _mid(m: int) -> int:
    if m < 2:
        raise DomainError(f"Need m >= 2, got {m}")
    return (1 << (m - 1)) - 1


def cross_phi_digits(expansion: DigitExpansion) -> Fraction:
    """Exact value for a digit expansion."""
    c = _mid(expansion.m)
    total = Fraction(0)
    j = 0
    for d in expansion.prefix + expansion.period:
        j += 1
        if d < c:
            return total
        if d > c + 1:
            return total + Fraction(1, 1 << (j - 1))
        total += Fraction(d - c, 1 << j)

    if not expansion.period:
        # trailing zeros sit in the gap below c
        return total
    # the period stayed on A: add the remaining repeats as a geometric series
    P = len(expansion.period)
    block = sum(
        Fraction(d - c, 1 << (t + 1)) for t, d in enumerate(expansion.period)
    )
    shift = Fraction(1, 1 << j)
    return total + shift * block / (1 - Fraction(1, 1 << P))


def cross_phi_eval(m: int, digit_string: str) -> Fraction:
    """Value at ``0.digits`` (base ``2**m``) given as a digit string."""
    return cross_phi_digits(parse_digits(m, digit_string))


def expansion_of(m: int, x: Fraction) -> DigitExpansion:
    """Eventually periodic base ``2**m`` expansion of a rational in [0, 1)."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"Expansion needs 0 <= x < 1, got {x}")
    base = 1 << m
    if x.denominator.bit_length() > config.MAX_EXPONENT_BITS:
        raise ResourceBudgetError(f"Denominator of {x} exceeds the exponent budget")

    digits: List[int] = []
    seen = {}
    num, den = x.numerator, x.denominator
    while num and num not in seen:
        seen[num] = len(digits)
        d, num = divmod(num * base, den)
        digits.append(d)
    if not num:
        return DigitExpansion(m, tuple(digits))
    start = seen[num]
    return DigitExpansion(m, tuple(digits[:start]), tuple(digits[start:]))


def cross_phi_of_fraction(m: int, x: Fraction) -> Fraction:
    """Exact value at a rational point of [0, 1]."""
    x = Fraction(x)
    if x == 1:
        _mid(m)
        return Fraction(1)
    return cross_phi_digits(expansion_of(m, x))


def cross_phi_grid(m: int, K: int) -> np.ndarray:
    """Float values at ``k / 2**(m K)`` for ``k = 0 .. 2**(m K)``."""
    c = _mid(m)
    n = 1 << (m * K)
    k = np.arange(n + 1, dtype=np.int64)
    total = np.zeros(n + 1)
    alive = np.ones(n + 1, dtype=bool)
    for j in range(1, K + 1):
        d = (k >> (m * (K - j))) & ((1 << m) - 1)
        below = alive & (d < c)
        above = alive & (d > c + 1)
        total[above] += 2.0 ** (1 - j)
        alive &= ~(below | above)
        total[alive] += (d[alive] - c) * 2.0**-j
    total[n] = 1.0
    return total


def cross_phi_holder(m: int, K: int = 4, pair_budget: Optional[int] = None) -> float:
    """Largest |phi(x) - phi(y)| / |x - y|^(1/m) on the grid of spacing 2^(-m K)."""
    values = cross_phi_grid(m, K)
    x = np.linspace(0.0, 1.0, values.shape[0])
    best, checked = max_holder_ratio(x, np.zeros_like(x), values, 1.0 / m, pair_budget)
    if not math.isfinite(best):
        raise ContractError(f"Hölder ratio of the cross function is infinite, m={m}")
    logger.info(f"Cross phi m={m} K={K}: ratio {best:.6f} over {checked} pairs")
    return best


def level_point(m: int, r: Fraction) -> Fraction:
    """The point of A mapped to ``r``: binary digits of ``r`` shifted onto c, c+1.

    Only dyadic ``r`` is accepted, so the digits terminate and the point is
    followed by repeated ``c``.
    """
    c = _mid(m)
    r = Fraction(r)
    if r.denominator & (r.denominator - 1):
        raise DomainError(f"Level {r} is not dyadic")
    bits = r.denominator.bit_length() - 1
    base = 1 << m
    x = Fraction(c, base - 1)
    for j in range(1, bits + 1):
        bit = (r.numerator >> (bits - j)) & 1
        x += Fraction(bit, base**j)
    return x


def thin_squares(m: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Lower-left corners of level-n squares that are vertical thin at every step.

    Coordinates are in units of ``2**(-m n)``.
    """
    if m * n > 62:
        raise ResourceBudgetError(f"Level {n} squares of m={m} overflow int64")
    if n > SECTION_MAX_N:
        raise ResourceBudgetError(
            f"Section count at n={n} lists 4^n squares (max n={SECTION_MAX_N})"
        )
    model = build_cross(m)
    steps = np.array(
        [sq for sq in model.squares if model.section(sq) == "thinV"], dtype=np.int64
    )
    X = np.zeros(1, dtype=np.int64)
    Y = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        X = ((X[:, None] << m) + steps[None, :, 0]).ravel()
        Y = ((Y[:, None] << m) + steps[None, :, 1]).ravel()
    return X, Y


def level_section_count(m: int, r: float, n: int) -> int:
    """Level-n vertical thin squares on which the cross function takes value r.

    A square counts when the values at the two ends of its x-range bracket r.
    """
    exact = Fraction(r)
    if not 0 < exact < 1:
        raise GuardError(f"Level {r} outside (0, 1)")
    if (exact * (1 << n)).denominator == 1:
        raise GuardError(f"Level {r} is an endpoint of a level-{n} gap")
    if n < 1:
        raise ContractError(f"Need n >= 1, got {n}")

    X, _ = thin_squares(m, n)
    columns, inverse = np.unique(X, return_inverse=True)
    scale = 1 << (m * n)
    hit = np.array(
        [
            cross_phi_of_fraction(m, Fraction(x, scale))
            < exact
            < cross_phi_of_fraction(m, Fraction(x + 1, scale))
            for x in columns.tolist()
        ],
        dtype=bool,
    )
    count = int(np.count_nonzero(hit[inverse]))
    logger.debug(f"Sections m={m} n={n} r={r}: {count} of {X.shape[0]} squares")
    return count


def level_section_slope(
    m: int, r: float, levels: Sequence[int]
) -> Tuple[List[int], float]:
    """Counts per level and the slope of log count against log inverse scale."""
    counts = [level_section_count(m, r, n) for n in levels]
    fit = linregress(
        [n * m * math.log(2.0) for n in levels], [math.log(c) for c in counts]
    )
    return counts, float(fit.slope)
