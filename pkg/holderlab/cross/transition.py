"""
Phase transition of the Hölder thickness of the cross construction.

Below ``alpha = 1/m`` the thickness equals ``1/m``.  Above the threshold
``alpha_1(L)`` the image-count bound of level sets with conductivity parameter
``L`` gives exponents ``beta > 1`` and a lower bound ``beta / m``; ``L`` must
exceed 9 for that range to exist.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Tuple

from scipy.optimize import bisect

from ..config import config
from ..errors import DomainError, ParameterError
from ..models import TransitionRecord
from .model import build_cross, type_counts

logger = logging.getLogger(__name__)

LOG2_3 = math.log2(3.0)
P3 = math.log(2.0) / math.log(3.0)


def gap(L: float) -> float:
    """log2/log3 - log4/logL; positive exactly when L > 9."""
    if L <= 1:
        raise ParameterError(f"L must exceed 1, got {L}")
    return P3 - math.log(4.0) / math.log(L)


def alpha_one(L: float) -> float:
    return 1.0 - LOG2_3 * gap(L)


def feasibility_threshold(tol: Optional[float] = None) -> float:
    """Smallest L with a positive gap, by bisection."""
    tol = config.BISECTION_TOL if tol is None else tol
    return float(
        bisect(gap, 2.0, 100.0, xtol=tol, maxiter=config.BISECTION_MAX_ITER)
    )


def beta_range(L: float, alpha: float) -> Optional[Tuple[float, float]]:
    """Open interval of beta with 1 < beta < log2 3 and 1 - beta * gap < alpha."""
    g = gap(L)
    if g <= 0:
        return None
    lo = max(1.0, (1.0 - alpha) / g)
    return (lo, LOG2_3) if lo < LOG2_3 else None


def small_alpha_value(m: int, alpha: float) -> float:
    """Thickness in the flat phase."""
    if not 0 < alpha < 1.0 / m:
        raise DomainError(f"The flat phase needs 0 < alpha < 1/m, got {alpha}")
    return 1.0 / m


def box_dimension(m: int) -> float:
    """Box dimension of the digit set of the cross function."""
    if m < 2:
        raise ParameterError(f"Need m >= 2, got {m}")
    return 1.0 / m


def log2_ratio(
    m: int,
    L: int,
    alpha: float,
    beta: float,
    eps: float = 0.0,
    type2: Optional[int] = None,
    type3: Optional[int] = None,
) -> float:
    """log2 of the geometric ratio bounding the images of level-set pieces.

    The three factors are the type 1/2 chains, the type 3 steps and the type 4
    steps; square counts are measured from the construction unless given.
    """
    if not 1.0 < beta < LOG2_3:
        raise DomainError(f"beta must lie in (1, log2 3), got {beta}")
    if type2 is None or type3 is None:
        counts = type_counts(build_cross(m), L)
        type2 = counts.t2 if type2 is None else type2
        type3 = counts.t3 if type3 is None else type3
    pL = math.log(2.0) / math.log(L)
    a_L = max(type3, 1) / 2.0**m
    e = math.e
    return (
        -m * alpha
        + math.log2(e / (1.0 - beta * P3))
        + (1.0 - (beta - eps) * P3) * (math.log2(a_L) + m)
        + math.log2(e / (beta * pL))
        + 2.0 * m * (beta + eps) * pL
        + math.log2(type2 + 4)
    )


def transition_bounds(m: int, L: int, alpha: float) -> TransitionRecord:
    """Phase of (m, L, alpha) with the exponents that certify it."""
    if m < 2:
        raise ParameterError(f"Need m >= 2, got {m}")
    if L < 2:
        raise ParameterError(f"L must be at least 2, got {L}")
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")

    feasible = L > 9
    a1 = alpha_one(L)
    window = beta_range(L, alpha)
    beta_min = beta_max = d_star = log2_c = None
    if window is not None:
        beta_min, beta_max = window
        d_star = beta_max / m
        log2_c = log2_ratio(m, L, alpha, 0.5 * (beta_min + beta_max))

    if alpha < 1.0 / m:
        phase = "flat"
    elif feasible and alpha > a1 and window is not None:
        phase = "thick"
    else:
        phase = "undetermined"

    logger.info(f"Transition m={m} L={L} alpha={alpha}: {phase}, alpha1={a1:.6f}")
    return TransitionRecord(
        m=m,
        L=L,
        alpha=alpha,
        alpha1=a1,
        feasible=feasible,
        beta_min=beta_min,
        beta_max=beta_max,
        d_star_lower=d_star,
        phase=phase,
        flat_value=1.0 / m,
        box_dimension=box_dimension(m),
        log2_c=log2_c,
    )
