"""
Seeded random streams.

Every random draw in ubmat comes from a numpy PCG64 generator seeded with
SeedSequence([seed, purpose, index]). Work is split into numbered units
(mixture replicate blocks, simulation replicates) and each unit owns its
stream, so results do not depend on how units are scheduled on workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

from ubmat.core.errors import UBMatError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Stream purposes
MIXTURE_STREAM = 1
MOMENT_STREAM = 2
STUDY_STREAM = 3
SAMPLE_STREAM = 4


def make_stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    """Independent generator for unit ``index`` of a given purpose."""
    if seed < 0:
        raise UBMatError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, purpose, index])))


def block_ranges(total: int, block_size: int) -> List[Tuple[int, int, int]]:
    """Split ``total`` replicates into (block index, start, stop) triples."""
    if total < 1:
        raise UBMatError(f"replicates must be at least 1, got {total}")
    return [
        (index, start, min(start + block_size, total))
        for index, start in enumerate(range(0, total, block_size))
    ]


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Map ``fn`` over ``items`` on up to ``workers`` threads, keeping input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
