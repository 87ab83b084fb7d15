"""Pydantic records for audit reports, tables and run configuration."""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class AuditReport(BaseModel):
    """Outcome of an invariant audit."""

    name: str = Field(..., description="Audit identifier")
    passed: bool = Field(..., description="Whether every checked case held")
    checked: int = Field(..., description="Number of cases checked")
    violations: int = Field(default=0, description="Number of failing cases")
    max_ratio: Optional[float] = Field(
        default=None, description="Largest observed ratio against the audited bound"
    )
    details: Dict[str, Any] = Field(
        default_factory=dict, description="Audit-specific scalars"
    )
    samples: List[str] = Field(
        default_factory=list, description="A few failing cases for diagnosis"
    )


class HistogramReport(BaseModel):
    """Conductivity census of one scheme level."""

    n: int = Field(..., description="Scheme level")
    counts: Dict[int, int] = Field(..., description="Node count by kexp")
    per_root: Dict[int, Dict[int, int]] = Field(
        ..., description="Node count by kexp below each level-1 triangle"
    )
    per_root_prediction: Dict[int, int] = Field(
        ..., description="binom(n-1, k) * 6^k by kexp"
    )
    total: int = Field(..., description="Number of nodes")
    total_prediction: int = Field(..., description="3 * 7^(n-1)")
    matches: bool = Field(..., description="Counts agree with the closed forms")


class FrontStatsRow(BaseModel):
    """Front statistics of one scheme level for a level query."""

    n: int
    front_size: int = Field(..., description="Straddling scheme-level-n cells")
    tau_front_size: int = Field(..., description="Straddling level-n triangles")
    max_kappa: float = Field(..., description="Largest conductivity on the front")
    highcond_mass: float = Field(
        ..., description="Conductivity sum over front cells with kappa >= 2^(-n d1)"
    )
    image_mass_bound: float = Field(
        ..., description="Sum of value ranges over cells with kappa >= 2^(-n d1)"
    )
    kappa_total: float = Field(..., description="Conductivity sum over the front")
    cert_lowbox: Optional[bool] = Field(
        default=None,
        description="front_size >= 2^(n d1 - 1) when highcond_mass < 1/2, else null",
    )
    slope: Optional[float] = Field(default=None, description="log2(front_size) / n")


class CurveRow(BaseModel):
    """One grid point of the bound curves."""

    alpha: float
    lower_raw: float = Field(..., description="Inverse of the lower Hausdorff curve")
    lower_hausdorff: float = Field(..., description="lower_raw / (1 + lower_raw)")
    lower_box: float = Field(..., description="Inverse of the lower box curve")
    upper_raw: float = Field(..., description="Inverse of the witness curve")
    upper: float = Field(..., description="upper_raw / (1 + upper_raw)")


class CurveTable(BaseModel):
    """Bound curves over an alpha grid with the ordering checks."""

    rows: List[CurveRow]
    tolerance: float
    grid: Dict[str, Any] = Field(default_factory=dict)
    violations: List[int] = Field(
        default_factory=list, description="Row indices breaking an ordering invariant"
    )


class SeriesProbe(BaseModel):
    """Value of one series term and its partial sum."""

    n: int
    d1: float
    alpha: float
    kind: Literal["hausdorff", "box"]
    term: float = Field(..., description="The n-th term (inf if it overflows)")
    log_term: float = Field(..., description="Natural log of the n-th term")
    partial_sum: float = Field(..., description="Sum of terms 1..n")
    log_space: bool = Field(..., description="Whether log-space evaluation was used")


class PhiEvalResult(BaseModel):
    """Value enclosure of the witness on a block cylinder."""

    blocks: List[str]
    interval: List[str] = Field(..., description="Exact endpoints as fractions")
    rank: Optional[int] = Field(
        default=None, description="Position of the cylinder among admissible chains"
    )
    size: int = Field(..., description="Number of admissible blocks")
    constant: bool = Field(..., description="True when the witness is constant here")


class OptimizeResult(BaseModel):
    """Block parameters meeting both witness constraints."""

    alpha: float
    eps: float
    kstar: int
    w: int
    size: int = Field(..., description="Number of admissible blocks")
    ratio: float = Field(..., description="w / (kstar + w)")
    target: float = Field(..., description="Box-dimension target including eps")
    hypothesis_margin: float = Field(
        ..., description="log2(size) - (kstar + w) * alpha"
    )


class LevelCellCount(BaseModel):
    """Front of a witness level set and the cylinder that certifies it."""

    r: float
    n: int
    depth: int = Field(..., description="Triangle level n (kstar + w)")
    count: int = Field(..., description="Cells at depth whose corners straddle r")
    bound: int = Field(..., description="2^(n w)")
    rank: int
    chain: List[str]
    cylinder_triangles: int = Field(
        ..., description="Constituent triangles of the certifying chain"
    )


class TypeCountsReport(BaseModel):
    """Square type census of the cross construction."""

    m: int
    L: int
    t1: int
    t2: int
    t3: int
    t4: int
    thin: int
    t3_over_side: float = Field(..., description="t3 / 2^m")
    t4_over_area: float = Field(..., description="t4 / 2^(2m)")


class TransitionRecord(BaseModel):
    """Phase-transition quantities for the cross construction."""

    m: int
    L: int
    alpha: float
    alpha1: float
    feasible: bool
    beta_min: Optional[float] = None
    beta_max: Optional[float] = None
    d_star_lower: Optional[float] = None
    phase: Literal["flat", "thick", "undetermined"]
    flat_value: float = Field(..., description="Thickness 1/m in the flat phase")
    box_dimension: float = Field(..., description="Box dimension of the section set")
    log2_c: Optional[float] = Field(
        default=None, description="log2 of the geometric ratio of the image bound"
    )


class RunConfig(BaseModel):
    """Everything that determines the output of one CLI invocation."""

    command: str
    seed: int = Field(default=0, ge=0, lt=2**64)
    output: Optional[str] = None
    format: Literal["csv", "jsonl", "json"] = "json"
    mode: Literal["exact", "float"] = "float"
    workers: int = Field(default=1, ge=1)


class FrontSlopeReport(BaseModel):
    """Front sizes of the plain triangle levels and their log-log slope."""

    levels: List[int]
    counts: List[int]
    slopes: List[Optional[float]] = Field(
        ..., description="log2(count) / n per level, null for an empty front"
    )
    fit_slope: Optional[float] = Field(
        default=None, description="Least-squares slope of log2(count) against n"
    )


class DimensionCertificate(BaseModel):
    """Level-set and regularity figures of one choice of block parameters."""

    kstar: int
    w: int
    alpha: float
    size: int = Field(..., description="Number of admissible blocks")
    box_bound: float = Field(..., description="w / (kstar + w)")
    hypothesis_margin: float = Field(
        ..., description="log2(size) - (kstar + w) * alpha; Hölder needs >= 0"
    )
    binom_lower: int = Field(..., description="binom(kstar, w) * 2^w")
    binom_ok: bool = Field(..., description="binom_lower <= size")
