"""
FastAPI server for the Hölder thickness calculators.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional

from fastapi import FastAPI, HTTPException, status
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from .bounds import curve_table, invert_h
from .config import config
from .cross.phi import cross_phi_eval, cross_phi_of_fraction
from .cross.transition import transition_bounds
from .errors import HolderLabError
from .models import CurveTable, HistogramReport, PhiEvalResult, TransitionRecord
from .phi.admissible import AdmissibleSet, parse_blocks
from .phi.witness import Witness
from .scheme import expand_scheme, histogram

# Set up logging
logging.basicConfig(level=config.LOG_LEVEL)
logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="Hölder Thickness Lab API",
    description="Bound curves, conductivity censuses and witness evaluation",
    version=__version__,
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Largest scheme level the histogram endpoint enumerates
HISTOGRAM_API_MAX_N = 7


class CurveRequest(BaseModel):
    """Request model for the bound-curve table."""

    alphas: List[float] = Field(
        ..., min_length=1, max_length=10_000, description="Alpha grid"
    )


class InvertRequest(BaseModel):
    """Request model for inverting one bound function."""

    kind: str = Field(..., description="lower_hausdorff, lower_box or upper_witness")
    alpha: float = Field(..., description="Target value of the bound function")


class InvertResponse(BaseModel):
    kind: str
    alpha: float
    t: float = Field(..., description="Solution of h(t) = alpha")


class PhiEvalRequest(BaseModel):
    """Request model for evaluating the witness on a cylinder."""

    kstar: int = Field(default=3, ge=1, le=12, description="Block length")
    w: int = Field(default=1, ge=0, description="Non-3 digit budget per block")
    blocks: str = Field(..., description="Blocks such as '323|033'")


class TransitionRequest(BaseModel):
    """Request model for the cross phase-transition calculator."""

    m: int = Field(..., ge=2, le=12, description="Grid exponent")
    L: int = Field(..., ge=2, description="Conductivity depth parameter")
    alpha: float = Field(..., gt=0, le=1, description="Hölder exponent")


class CrossPhiRequest(BaseModel):
    """Request model for the cross function; give digits or a fraction."""

    m: int = Field(..., ge=2, le=12, description="Grid exponent")
    digits: Optional[str] = Field(
        default=None, description="Base-2^m digits, period in parentheses"
    )
    x: Optional[str] = Field(default=None, description="Rational point such as 1/3")


class CrossPhiResponse(BaseModel):
    m: int
    value: str = Field(..., description="Exact value as a fraction")
    approx: float


class HealthResponse(BaseModel):
    """Response model for health endpoint."""

    status: str = Field(..., description="Health status")
    version: str = Field(..., description="Package version")
    workers: int = Field(..., description="Configured worker count")


def _bad_request(e: HolderLabError) -> HTTPException:
    logger.warning(f"Rejected request: {e}")
    return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


def _server_error(what: str, e: Exception) -> HTTPException:
    logger.error(f"{what} failed: {e}")
    return HTTPException(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        detail=f"{what} failed: {e}",
    )


@app.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint."""
    return HealthResponse(status="ok", version=__version__, workers=config.WORKERS)


@app.post("/bounds/curve", response_model=CurveTable)
def bounds_curve(request: CurveRequest):
    """Bound curves over an alpha grid."""
    try:
        return curve_table(request.alphas)
    except HolderLabError as e:
        raise _bad_request(e) from e
    except Exception as e:
        raise _server_error("Curve table", e) from e


@app.post("/bounds/invert", response_model=InvertResponse)
def bounds_invert(request: InvertRequest):
    """Invert one bound function at a single alpha."""
    try:
        t = invert_h(request.kind, request.alpha)
    except HolderLabError as e:
        raise _bad_request(e) from e
    except Exception as e:
        raise _server_error("Inversion", e) from e
    return InvertResponse(kind=request.kind, alpha=request.alpha, t=float(t))


@app.post("/phi/eval", response_model=PhiEvalResult)
def phi_eval(request: PhiEvalRequest):
    """Value enclosure of the witness on a block cylinder."""
    try:
        witness = Witness(AdmissibleSet(request.kstar, request.w))
        return witness.eval_blocks(parse_blocks(request.blocks))
    except HolderLabError as e:
        raise _bad_request(e) from e
    except Exception as e:
        raise _server_error("Witness evaluation", e) from e


@app.get("/scheme/histogram/{n}", response_model=HistogramReport)
def scheme_histogram(n: int):
    """Conductivity census of scheme level ``n``."""
    if not 1 <= n <= HISTOGRAM_API_MAX_N:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"n must lie in 1..{HISTOGRAM_API_MAX_N}, got {n}",
        )
    try:
        atlas = expand_scheme(n, budget=config.SCHEME_NODE_BUDGET)
        return histogram(atlas, n)
    except HolderLabError as e:
        raise _bad_request(e) from e
    except Exception as e:
        raise _server_error("Histogram", e) from e


@app.post("/cross/transition", response_model=TransitionRecord)
def cross_transition(request: TransitionRequest):
    """Phase of (m, L, alpha) for the cross construction."""
    try:
        return transition_bounds(request.m, request.L, request.alpha)
    except HolderLabError as e:
        raise _bad_request(e) from e
    except Exception as e:
        raise _server_error("Transition", e) from e


@app.post("/cross/phi", response_model=CrossPhiResponse)
def cross_phi(request: CrossPhiRequest):
    """Exact value of the cross function at a digit string or a fraction."""
    if (request.digits is None) == (request.x is None):
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="Give exactly one of digits and x",
        )
    try:
        if request.digits is not None:
            value = cross_phi_eval(request.m, request.digits)
        else:
            value = cross_phi_of_fraction(request.m, Fraction(request.x))
    except (HolderLabError, ValueError, ZeroDivisionError) as e:
        logger.warning(f"Rejected request: {e}")
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail=str(e)
        ) from e
    except Exception as e:
        raise _server_error("Cross function", e) from e
    return CrossPhiResponse(m=request.m, value=str(value), approx=float(value))


@app.get("/")
async def root() -> Dict[str, Any]:
    """Root endpoint with basic info."""
    return {
        "message": "Hölder Thickness Lab API",
        "version": __version__,
        "endpoints": {
            "health": "/health",
            "curve": "/bounds/curve",
            "invert": "/bounds/invert",
            "phi": "/phi/eval",
            "histogram": "/scheme/histogram/{n}",
            "transition": "/cross/transition",
            "cross_phi": "/cross/phi",
            "docs": "/docs",
        },
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host=config.API_HOST, port=config.API_PORT, log_level="info")
