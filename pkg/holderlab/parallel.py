"""Seed splitting and order-preserving fan-out."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import numpy as np

from .config import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent per-item seed sequences derived from one run seed."""
    return np.random.SeedSequence(seed).spawn(count)


def item_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for work item ``index``; independent of how items are scheduled."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def ordered_map(
    fn: Callable[[T], R], items: Sequence[T], workers: int | None = None
) -> List[R]:
    """Apply ``fn`` to every item, results in input order."""
    workers = config.WORKERS if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Fanning out {len(items)} items over {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
