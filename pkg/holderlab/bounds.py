"""
Lower and upper thickness bound curves and their inverses.

Three strictly increasing functions are handled:

* ``lower_hausdorff``  h_l(d) on (0, 1/2]
* ``lower_box``        h_B(d) on (0, 1/3]
* ``upper_witness``    h_u(t) on (0, 1/2], onto (0, 1]

Evaluation uses ``scipy.special.xlogy`` so the entropy terms extend by 0 at the
endpoints; inverses are vectorized bisections over whole alpha grids.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Literal, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy
from scipy.stats import linregress

from .config import config
from .errors import DomainError
from .models import AuditReport, CurveRow, CurveTable, SeriesProbe

logger = logging.getLogger(__name__)

BoundKind = Literal["lower_hausdorff", "lower_box", "upper_witness"]
SeriesKind = Literal["hausdorff", "box"]
ArrayLike = Union[float, Sequence[float], np.ndarray]

DOMAIN_END: Dict[str, float] = {
    "lower_hausdorff": 0.5,
    "lower_box": 1.0 / 3.0,
    "upper_witness": 0.5,
}

LN2 = math.log(2.0)
LOG2_3 = math.log2(3.0)


def _check_kind(kind: str) -> float:
    if kind not in DOMAIN_END:
        raise DomainError(f"Unknown bound kind {kind!r}")
    return DOMAIN_END[kind]


def _check_domain(kind: str, t: np.ndarray, closed_left: bool = False) -> None:
    end = _check_kind(kind)
    low_ok = t >= 0 if closed_left else t > 0
    if not np.all(low_ok & (t <= end)):
        raise DomainError(f"{kind} is defined on (0, {end:.6g}], got {t}")


def _h(kind: str, t: np.ndarray) -> np.ndarray:
    if kind == "lower_hausdorff":
        ent = -xlogy(t, t) - xlogy(1 - t, 1 - t)
        return (ent + t * math.log(6.0)) / ((1 + t) * LN2)
    if kind == "lower_box":
        num = (
            xlogy(1 - t, 1 - t)
            - xlogy(t, t)
            - xlogy(1 - 2 * t, 1 - 2 * t)
            + t * math.log(3.0)
        )
        return num / LN2
    ent = -xlogy(1 - t, 1 - t) - xlogy(t, t)
    return (ent / LN2 + t) / (1 + t)


def eval_h(kind: BoundKind, t: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluate a bound function; scalars in, scalar out."""
    arr = np.asarray(t, dtype=float)
    _check_domain(kind, arr)
    out = _h(kind, arr)
    return float(out) if out.ndim == 0 else out


def derivative(kind: BoundKind, t: ArrayLike) -> Union[float, np.ndarray]:
    arr = np.asarray(t, dtype=float)
    _check_domain(kind, arr)
    if kind == "lower_hausdorff":
        out = np.log(6 * (1 - arr) ** 2 / arr) / ((1 + arr) ** 2 * LN2)
    elif kind == "lower_box":
        out = np.log(3 * (1 - 2 * arr) ** 2 / (arr * (1 - arr))) / LN2
    else:
        out = (2 * np.log2(1 - arr) - np.log2(arr) + 1) / (1 + arr) ** 2
    return float(out) if out.ndim == 0 else out


def monotonicity_certificate(kind: BoundKind, points: int = 1000) -> AuditReport:
    """Positive derivative and increasing values on an interior grid."""
    end = _check_kind(kind)
    grid = np.linspace(0.0, end, points + 2)[1:-1]
    values = _h(kind, grid)
    slopes = np.asarray(derivative(kind, grid))
    bad_steps = int(np.count_nonzero(np.diff(values) <= 0))
    bad_slopes = int(np.count_nonzero(slopes <= 0))
    return AuditReport(
        name=f"monotone_{kind}",
        passed=bad_steps == 0 and bad_slopes == 0,
        checked=points,
        violations=bad_steps + bad_slopes,
        details={"min_derivative": float(slopes.min())},
    )


def invert_h(
    kind: BoundKind, alpha: ArrayLike, tol: Optional[float] = None
) -> Union[float, np.ndarray]:
    """Solve h(t) = alpha by bisection until |h(t) - alpha| <= tol for every entry."""
    tol = config.BISECTION_TOL if tol is None else tol
    if tol <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")
    end = _check_kind(kind)
    target = np.atleast_1d(np.asarray(alpha, dtype=float))
    top = float(_h(kind, np.array(end)))
    if not np.all((target > 0) & (target <= top)):
        raise DomainError(f"alpha must lie in (0, {top:.6g}] for {kind}, got {alpha}")

    left = np.zeros_like(target)
    right = np.full_like(target, end)
    mid = (left + right) / 2.0
    for i in range(config.BISECTION_MAX_ITER):
        mid = (left + right) / 2.0
        value = _h(kind, mid)
        if np.all(np.abs(value - target) <= tol):
            break
        high = value > target
        right = np.where(high, mid, right)
        left = np.where(high, left, mid)
        if np.all(right - left <= np.spacing(right)):
            break
    else:
        logger.warning(
            f"Bisection for {kind} hit {config.BISECTION_MAX_ITER} iterations"
        )

    at_end = target == top
    mid = np.where(at_end, end, mid)
    return float(mid[0]) if np.ndim(alpha) == 0 else mid


def exponent_c(d1: float, alpha: float, kind: SeriesKind = "hausdorff") -> float:
    """Exponential growth rate of the n-th series term (natural log)."""
    if kind == "hausdorff":
        _check_domain("lower_hausdorff", np.asarray(d1))
        ent = -(xlogy(d1, d1) + xlogy(1 - d1, 1 - d1))
        return float(ent + d1 * math.log(6.0) - alpha * (1 + d1) * LN2)
    if kind == "box":
        _check_domain("lower_box", np.asarray(d1))
        num = (
            xlogy(1 - d1, 1 - d1)
            - xlogy(d1, d1)
            - xlogy(1 - 2 * d1, 1 - 2 * d1)
            + d1 * math.log(3.0)
        )
        return float(num - alpha * LN2)
    raise DomainError(f"Unknown series kind {kind!r}")


def _log_term(n: int, d1: float, alpha: float, kind: SeriesKind) -> float:
    k = np.arange(int(math.floor(n * d1)) + 1, dtype=float)
    if kind == "hausdorff":
        logs = (
            gammaln(n + 1)
            - gammaln(k + 1)
            - gammaln(n - k + 1)
            + k * math.log(6.0)
            - (n + k) * alpha * LN2
        )
        return float(logsumexp(logs))
    k = k[2 * k <= n]
    logs = (
        gammaln(n - k + 1)
        - gammaln(k + 1)
        - gammaln(n - 2 * k + 1)
        + k * math.log(3.0)
    )
    return float(math.log(6.0) + logsumexp(logs) - n * alpha * LN2)


def _direct_term(n: int, d1: float, alpha: float, kind: SeriesKind) -> float:
    top = int(math.floor(n * d1))
    if kind == "hausdorff":
        return sum(
            float(math.comb(n, k) * 6**k) * 2.0 ** (-(n + k) * alpha)
            for k in range(top + 1)
        )
    exact = sum(math.comb(n - k, k) * 3**k for k in range(top + 1) if 2 * k <= n)
    return 6.0 * float(exact) * 2.0 ** (-n * alpha)


def _check_series(n: int, d1: float, kind: str) -> None:
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if kind not in ("hausdorff", "box"):
        raise DomainError(f"Unknown series kind {kind!r}")
    if not 0 < d1 < 1:
        raise DomainError(f"d1 must lie in (0, 1), got {d1}")


def series_term(
    n: int, d1: float, alpha: float, kind: SeriesKind = "hausdorff"
) -> SeriesProbe:
    """The n-th term of the conductivity series and the partial sum of terms 1..n."""
    _check_series(n, d1, kind)
    log_space = n > config.SERIES_LOG_THRESHOLD
    if log_space:
        log_term = _log_term(n, d1, alpha, kind)
        term = math.exp(log_term) if log_term < 709 else math.inf
    else:
        term = _direct_term(n, d1, alpha, kind)
        log_term = math.log(term)

    logs = [_log_term(j, d1, alpha, kind) for j in range(1, n + 1)]
    log_sum = float(logsumexp(logs))
    return SeriesProbe(
        n=n,
        d1=d1,
        alpha=alpha,
        kind=kind,
        term=term,
        log_term=log_term,
        partial_sum=math.exp(log_sum) if log_sum < 709 else math.inf,
        log_space=log_space,
    )


def series_exponent_fit(
    d1: float,
    alpha: float,
    kind: SeriesKind = "hausdorff",
    n_range: Sequence[int] = (200, 400),
) -> Dict[str, float]:
    """Fitted slope of log M_n against n next to the closed-form exponent."""
    ns = np.arange(n_range[0], n_range[1] + 1)
    logs = [_log_term(int(n), d1, alpha, kind) for n in ns]
    slope = float(linregress(ns, logs).slope)
    c = exponent_c(d1, alpha, kind)
    return {
        "slope": slope,
        "exponent": c,
        "relative_error": abs(slope - c) / abs(c) if c else math.inf,
    }


def tail_index(
    d1: float,
    alpha: float,
    kind: SeriesKind = "hausdorff",
    tol: float = 1e-9,
    max_n: int = 100_000,
) -> int:
    """First n with M_n / (1 - e^c) < tol; needs a convergent series (c < 0)."""
    c = exponent_c(d1, alpha, kind)
    if c >= 0:
        raise DomainError(f"Series diverges: exponent {c:.6g} >= 0")
    log_scale = -math.log1p(-math.exp(c))
    log_tol = math.log(tol)
    for n in range(1, max_n + 1):
        if _log_term(n, d1, alpha, kind) + log_scale < log_tol:
            return n
    raise DomainError(f"No tail index below {max_n} for d1={d1} alpha={alpha}")


def identity_residual(t: ArrayLike) -> Union[float, np.ndarray]:
    """(h_l(t) - h_u(t)) (1 + t) - t log2(3); zero up to rounding."""
    arr = np.asarray(t, dtype=float)
    _check_domain("upper_witness", arr)
    diff = _h("lower_hausdorff", arr) - _h("upper_witness", arr)
    out = diff * (1 + arr) - arr * LOG2_3
    return float(out) if out.ndim == 0 else out


def curve_table(alphas: ArrayLike, tol: Optional[float] = None) -> CurveTable:
    """Inverse bound curves on an alpha grid in (0, 1) with the ordering checks."""
    tol = config.BISECTION_TOL if tol is None else tol
    grid = np.atleast_1d(np.asarray(alphas, dtype=float))
    if not np.all((grid > 0) & (grid < 1)):
        raise DomainError("Curve grid must lie in (0, 1)")

    lower_raw = np.atleast_1d(invert_h("lower_hausdorff", grid, tol))
    lower_box = np.atleast_1d(invert_h("lower_box", grid, tol))
    upper_raw = np.atleast_1d(invert_h("upper_witness", grid, tol))
    lower = lower_raw / (1 + lower_raw)
    upper = upper_raw / (1 + upper_raw)

    slack = 1e-9
    bad = (
        (lower > upper + slack)
        | (lower_raw > upper_raw + slack)
        | (lower_box < lower - slack)
    )
    violations = np.nonzero(bad)[0].tolist()
    if violations:
        logger.error(f"Curve ordering broken at rows {violations}")

    rows = [
        CurveRow(
            alpha=float(a),
            lower_raw=float(lr),
            lower_hausdorff=float(lh),
            lower_box=float(lb),
            upper_raw=float(ur),
            upper=float(u),
        )
        for a, lr, lh, lb, ur, u in zip(
            grid, lower_raw, lower, lower_box, upper_raw, upper
        )
    ]
    return CurveTable(
        rows=rows,
        tolerance=tol,
        grid={"start": float(grid[0]), "stop": float(grid[-1]), "points": len(rows)},
        violations=violations,
    )


def asymptotic_gap(alpha: ArrayLike) -> Union[float, np.ndarray]:
    """Relative gap between the witness inverse and the lower Hausdorff inverse."""
    upper = np.asarray(invert_h("upper_witness", alpha))
    lower = np.asarray(invert_h("lower_hausdorff", alpha))
    out = (upper - lower) / upper
    return float(out) if out.ndim == 0 else out
