"""Sample moments and the closed-form UB coordinate estimators."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ubmat.core.config import Tolerances, get_settings
from ubmat.core.errors import UBMatError
from ubmat.service.ub_matrix import (
    NotPositiveDefiniteError,
    PartitionMismatchError,
    PartitionVector,
    UBMatrix,
    positive_definite_diagnostics,
    ub_inverse,
    ub_is_positive_definite,
)

logger = logging.getLogger(__name__)


class EstimationError(UBMatError):
    """Custom exception for estimation errors."""
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    n observations of a p-vector laid out by ``partition``.

    ``group_labels`` (optional) assigns every row to a group; groups are
    ordered by sorted label.
    """

    observations: np.ndarray
    partition: PartitionVector
    group_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        obs = np.array(self.observations, dtype=np.float64)
        if obs.ndim != 2:
            raise EstimationError(f"observations must be an n x p table, got shape {obs.shape}")
        if obs.shape[1] != self.partition.total:
            raise PartitionMismatchError(
                f"observations have {obs.shape[1]} columns but the partition totals {self.partition.total}"
            )
        if obs.shape[0] < 2:
            raise EstimationError(f"need at least 2 observations, got {obs.shape[0]}")
        if not np.all(np.isfinite(obs)):
            raise EstimationError("observations must be finite")
        obs.flags.writeable = False
        object.__setattr__(self, "observations", obs)

        if self.group_labels is not None:
            labels = np.asarray(self.group_labels)
            if labels.shape != (obs.shape[0],):
                raise EstimationError(
                    f"got {labels.size} group labels for {obs.shape[0]} observations"
                )
            object.__setattr__(self, "group_labels", labels)

    @property
    def n(self) -> int:
        return self.observations.shape[0]

    @property
    def p(self) -> int:
        return self.observations.shape[1]

    @property
    def is_grouped(self) -> bool:
        return self.group_labels is not None

    def groups(self) -> Tuple[Tuple[object, ...], np.ndarray]:
        """(sorted distinct labels, group index of every row)."""
        if self.group_labels is None:
            return (None,), np.zeros(self.n, dtype=np.intp)
        names, index = np.unique(self.group_labels, return_inverse=True)
        return tuple(names.tolist()), index.reshape(-1)

    @property
    def M(self) -> int:
        return len(self.groups()[0])

    @property
    def group_sizes(self) -> Tuple[int, ...]:
        _, index = self.groups()
        return tuple(int(c) for c in np.bincount(index))

    def ungrouped(self) -> "Dataset":
        return Dataset(self.observations, self.partition)


@dataclass(frozen=True, eq=False)
class SampleMoments:
    """Grand mean, per-group means and the (pooled) unbiased covariance."""

    mean: np.ndarray
    cov: np.ndarray
    n: int
    divisor: int
    group_means: np.ndarray
    group_sizes: Tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.group_sizes)


def _mean_and_scatter(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = rows.sum(axis=0) / rows.shape[0]
    centered = rows - mean
    return mean, centered.T @ centered


def sample_moments(d: Dataset) -> SampleMoments:
    """
    Two-pass sample moments.

    Ungrouped data use divisor n - 1. Grouped data are centered within each
    group and pooled with divisor n - M.

    Raises:
        EstimationError: if n <= M for grouped data
    """
    grand_mean, scatter = _mean_and_scatter(d.observations)

    if not d.is_grouped:
        cov = scatter / (d.n - 1)
        return SampleMoments(
            mean=grand_mean,
            cov=(cov + cov.T) / 2,
            n=d.n,
            divisor=d.n - 1,
            group_means=grand_mean[None, :],
            group_sizes=(d.n,),
        )

    _, index = d.groups()
    sizes = tuple(int(c) for c in np.bincount(index))
    M = len(sizes)
    if d.n <= M:
        raise EstimationError(f"pooled covariance needs n > M (n = {d.n}, M = {M})")

    means = np.empty((M, d.p))
    pooled = np.zeros((d.p, d.p))
    for m in range(M):
        means[m], group_scatter = _mean_and_scatter(d.observations[index == m])
        pooled += group_scatter

    cov = pooled / (d.n - M)
    return SampleMoments(
        mean=grand_mean,
        cov=(cov + cov.T) / 2,
        n=d.n,
        divisor=d.n - M,
        group_means=means,
        group_sizes=sizes,
    )


def covariance_coordinates(s: np.ndarray, partition: PartitionVector) -> UBMatrix:
    """
    Project a covariance matrix onto UB coordinates by block averaging.

    a_kk = [p_k tr(S_kk) - sum(S_kk)] / [p_k (p_k - 1)]
    b_kk = [sum(S_kk) - tr(S_kk)] / [p_k (p_k - 1)]
    b_kk' = sum(S_kk') / (p_k p_k')
    """
    s = np.asarray(s, dtype=np.float64)
    p = partition.total
    if s.shape != (p, p):
        raise PartitionMismatchError(f"covariance has shape {s.shape} but the partition needs ({p}, {p})")

    starts = partition.offsets[:-1]
    sums = np.add.reduceat(np.add.reduceat(s, starts, axis=0), starts, axis=1)
    traces = np.add.reduceat(np.diag(s), starts)
    sizes = partition.array
    pairs = sizes * (sizes - 1)

    b = sums / np.outer(sizes, sizes)
    b[np.diag_indices_from(b)] = (np.diag(sums) - traces) / pairs
    a = (sizes * traces - np.diag(sums)) / pairs
    return UBMatrix(a, (b + b.T) / 2, partition)


def parameter_count(partition: PartitionVector) -> int:
    """K + K(K+1)/2 free coordinates."""
    K = partition.K
    return K + K * (K + 1) // 2


def estimate_coordinates(s: SampleMoments, partition: PartitionVector,
                         allow_small_n: Optional[bool] = None) -> UBMatrix:
    """
    Best unbiased coordinate estimates (A-hat, B-hat) from sample moments.

    Raises:
        EstimationError: if n <= K + K(K+1)/2 and the override is off
    """
    if allow_small_n is None:
        allow_small_n = get_settings().allow_small_n

    needed = parameter_count(partition)
    if s.n <= needed:
        if not allow_small_n:
            raise EstimationError(
                f"n = {s.n} must exceed K + K(K+1)/2 = {needed} for partition ({partition}); "
                "use --allow-small-n to estimate anyway"
            )
        logger.warning("estimating %d coordinates from only n = %d observations", needed, s.n)

    logger.debug("estimating coordinates: n=%d, divisor=%d, partition=(%s)", s.n, s.divisor, partition)
    return covariance_coordinates(s.cov, partition)


def estimate_precision(est: UBMatrix, tol: Optional[Tolerances] = None) -> UBMatrix:
    """
    Plug-in precision coordinates (A-hat^-1, -Delta-hat^-1 B-hat A-hat^-1).

    Raises:
        NotPositiveDefiniteError: if the estimate is not positive definite
    """
    if not ub_is_positive_definite(est, tol):
        min_a, min_delta = positive_definite_diagnostics(est)
        raise NotPositiveDefiniteError(
            "estimated covariance is not positive definite; increase n or check the block structure",
            min_a,
            min_delta,
        )
    return ub_inverse(est, tol)


def block_average_covariance(est: UBMatrix) -> np.ndarray:
    """Covariance A P^-1 + B of the block averages Y = C X."""
    return np.diag(est.a / est.partition.array) + est.b


def block_averages(v: np.ndarray, partition: PartitionVector) -> np.ndarray:
    """Per-block means of a p-vector (or of every row of an (n, p) array)."""
    return partition.block_sums(np.asarray(v, dtype=np.float64)) / partition.array


def estimate_from_dataset(d: Dataset, allow_small_n: Optional[bool] = None) -> Tuple[SampleMoments, UBMatrix]:
    moments = sample_moments(d)
    return moments, estimate_coordinates(moments, d.partition, allow_small_n)
