"""Configuration for the Hölder thickness lab."""

import os

from dotenv import load_dotenv

# Load environment files in order of priority
# local.env takes precedence over .env
load_dotenv(".env")  # Load base config first
load_dotenv("local.env")  # Override with local config if it exists


class Config:
    """Configuration settings for computations, audits and the API."""

    # Checkpoints of long enumerations and streamed exports
    CACHE_DIR: str = os.getenv("HOLDERLAB_CACHE_DIR", "./cache")

    # Exact arithmetic
    MAX_EXPONENT_BITS: int = int(os.getenv("MAX_EXPONENT_BITS", "4096"))

    # Conductivity scheme enumeration
    SCHEME_MAX_DEPTH: int = int(os.getenv("SCHEME_MAX_DEPTH", "9"))
    SCHEME_NODE_BUDGET: int = int(os.getenv("SCHEME_NODE_BUDGET", "20000000"))
    HISTOGRAM_MAX_N: int = int(os.getenv("HISTOGRAM_MAX_N", "20"))

    # Level queries
    FLOAT_GUARD: float = float(os.getenv("FLOAT_GUARD", str(2.0**-40)))

    # Bound curves
    BISECTION_TOL: float = float(os.getenv("BISECTION_TOL", "1e-12"))
    BISECTION_MAX_ITER: int = int(os.getenv("BISECTION_MAX_ITER", "400"))
    SERIES_LOG_THRESHOLD: int = int(os.getenv("SERIES_LOG_THRESHOLD", "300"))

    # Audits
    HOLDER_PAIR_BUDGET: int = int(os.getenv("HOLDER_PAIR_BUDGET", "500000000"))
    FIELD_MAX_RETRIES: int = int(os.getenv("FIELD_MAX_RETRIES", "8"))
    PHI_BLOCK_BUDGET: int = int(os.getenv("PHI_BLOCK_BUDGET", "12"))

    # Execution
    WORKERS: int = int(os.getenv("WORKERS", "1"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # HTTP server
    API_HOST: str = os.getenv("API_HOST", "0.0.0.0")
    API_PORT: int = int(os.getenv("API_PORT", "8000"))


config = Config()
