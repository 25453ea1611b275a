"""Timing harness comparing the coordinate path with the dense reference path."""

import logging
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ubmat.core.config import get_settings
from ubmat.core.errors import UBMatError
from ubmat.service import dense_oracle
from ubmat.service import rng as rng_service
from ubmat.service.simulation import random_spd_ub
from ubmat.service.ub_matrix import (
    PartitionVector,
    UBMatrix,
    ub_determinant,
    ub_eigenvalues,
    ub_expand,
    ub_inverse,
    ub_multiply,
)

logger = logging.getLogger(__name__)

# Study profiles (K, p)
PRESETS: Dict[str, Tuple[int, int]] = {
    "proteomics": (7, 107),
    "imaging": (5, 227),
}

OPERATIONS = ("det", "inv", "eig", "mul")

# Dense operations with per-entry Python loops are skipped above dense_eig_max_dim
LOOP_BOUND_OPERATIONS = {"eig", "mul"}


class BenchmarkError(UBMatError):
    exit_code = 3


@dataclass(frozen=True)
class BenchTiming:
    op: str
    K: int
    p: int
    coordinate_seconds: float
    dense_seconds: Optional[float]
    repeats: int

    @property
    def speedup(self) -> Optional[float]:
        if self.dense_seconds is None or self.coordinate_seconds <= 0:
            return None
        return self.dense_seconds / self.coordinate_seconds


def near_even_partition(p: int, K: int) -> PartitionVector:
    """Split p into K block sizes differing by at most one."""
    if K < 1 or p < 2 * K:
        raise BenchmarkError(f"cannot split p = {p} into {K} blocks of size >= 2")
    base, extra = divmod(p, K)
    return PartitionVector(tuple(base + 1 if k < extra else base for k in range(K)))


def median_seconds(fn: Callable[[], object], repeats: int) -> float:
    """Median wall time of ``repeats`` calls."""
    timings = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - started)
    return statistics.median(timings)


def _coordinate_ops(x: UBMatrix) -> Dict[str, Callable[[], object]]:
    return {
        "det": lambda: ub_determinant(x),
        "inv": lambda: ub_inverse(x),
        "eig": lambda: ub_eigenvalues(x),
        "mul": lambda: ub_multiply(x, x),
    }


def _dense_ops(dense: np.ndarray) -> Dict[str, Callable[[], object]]:
    return {
        "det": lambda: dense_oracle.dense_determinant(dense),
        "inv": lambda: dense_oracle.dense_inverse(dense),
        "eig": lambda: dense_oracle.dense_symmetric_eigen(dense),
        "mul": lambda: dense_oracle.dense_matmul(dense, dense),
    }


def resolve_grid(presets: Iterable[str] = (), pairs: Iterable[Tuple[int, int]] = ()) -> List[Tuple[int, int]]:
    """(K, p) pairs from preset names and explicit pairs, in the given order."""
    grid = []
    for name in presets:
        if name not in PRESETS:
            raise BenchmarkError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
        grid.append(PRESETS[name])
    grid.extend((int(K), int(p)) for K, p in pairs)
    return grid


def run_benchmark(grid: Sequence[Tuple[int, int]], ops: Sequence[str] = OPERATIONS,
                  repeats: Optional[int] = None, seed: Optional[int] = None,
                  dense: bool = True) -> List[BenchTiming]:
    """Median timings per (K, p, op) on a random SPD instance."""
    settings = get_settings()
    repeats = repeats or settings.bench_repeats
    seed = settings.seed if seed is None else seed
    unknown = [op for op in ops if op not in OPERATIONS]
    if unknown:
        raise BenchmarkError(f"unknown operation {unknown[0]!r}; choose from {', '.join(OPERATIONS)}")

    results = []
    for index, (K, p) in enumerate(grid):
        partition = near_even_partition(p, K)
        x = random_spd_ub(partition, rng_service.make_stream(seed, rng_service.SAMPLE_STREAM, index))
        coordinate = _coordinate_ops(x)
        matrix = ub_expand(x) if dense else None
        reference = _dense_ops(matrix) if dense else {}

        for op in ops:
            coord_time = median_seconds(coordinate[op], repeats)
            dense_time = None
            if dense and not (op in LOOP_BOUND_OPERATIONS and p > settings.dense_eig_max_dim):
                dense_time = median_seconds(reference[op], min(repeats, 3))
            logger.debug("bench %s K=%d p=%d: %.3es coordinate, %s dense", op, K, p, coord_time, dense_time)
            results.append(BenchTiming(op, K, p, coord_time, dense_time, repeats))

    return results
