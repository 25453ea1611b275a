"""
Normal sampling with UB covariance and the Monte Carlo studies built on it.

Draws use the symmetric square root of Sigma, which is itself UB, applied
in O(pK) per observation; the dense Cholesky path is kept as a reference.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ubmat.core.config import get_settings
from ubmat.core.errors import UBMatError
from ubmat.service import rng as rng_service
from ubmat.service.dense_oracle import dense_cholesky
from ubmat.service.estimation import Dataset
from ubmat.service.inference import (
    m_sample_statistic,
    m_sample_null_law,
    noncentral_law,
    noncentrality_parameters,
    one_sample_null_law,
    one_sample_statistic,
)
from ubmat.service.mixture import MonteCarloLaw
from ubmat.service.ub_matrix import (
    PartitionVector,
    UBMatrix,
    ensure_positive_definite,
    ub_apply,
    ub_expand,
    ub_sqrt,
)

logger = logging.getLogger(__name__)


class SimulationError(UBMatError):
    """Custom exception for simulation plan errors."""
    pass


@dataclass(frozen=True, eq=False)
class StudyPlan:
    """
    Monte Carlo study configuration.

    ``means`` holds one row per group; a single row (one group) means a
    one-sample study against ``mu0``.
    """

    sigma: UBMatrix
    means: np.ndarray
    group_sizes: Tuple[int, ...]
    replicates: int
    seed: int
    alpha: float = 0.05
    mu0: Optional[np.ndarray] = None
    law_replicates: Optional[int] = None
    workers: Optional[int] = None
    allow_small_n: bool = False

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        p = self.sigma.p
        if means.shape[1] != p:
            raise SimulationError(f"means have {means.shape[1]} entries but p = {p}")
        if len(self.group_sizes) != means.shape[0]:
            raise SimulationError(f"{means.shape[0]} mean vectors for {len(self.group_sizes)} groups")
        if self.replicates < 1:
            raise SimulationError(f"replicates must be at least 1, got {self.replicates}")
        if not 0 < self.alpha < 1:
            raise SimulationError(f"alpha must lie in (0, 1), got {self.alpha}")
        ensure_positive_definite(self.sigma, "simulation covariance")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "group_sizes", tuple(int(s) for s in self.group_sizes))

        if self.is_one_sample:
            mu0 = means[0] if self.mu0 is None else np.asarray(self.mu0, dtype=np.float64)
            if mu0.shape != (p,):
                raise SimulationError(f"mu0 has {mu0.size} entries but p = {p}")
            object.__setattr__(self, "mu0", mu0)

    @property
    def is_one_sample(self) -> bool:
        return len(self.group_sizes) == 1

    @property
    def n(self) -> int:
        return sum(self.group_sizes)


@dataclass(frozen=True, eq=False)
class StudyResult:
    """Rejection rate of a study, with binomial error and the replicate statistics."""

    kind: str
    rejection_rate: float
    standard_error: float
    ci_low: float
    ci_high: float
    critical_value: float
    replicates: int
    seed: int
    statistics: np.ndarray
    predicted_power: Optional[float] = None
    predicted_power_se: Optional[float] = None
    noncentralities: Optional[np.ndarray] = None

    @property
    def mean_statistic(self) -> float:
        return float(np.mean(self.statistics))

    @property
    def mean_statistic_se(self) -> float:
        if self.statistics.size < 2:
            return math.nan
        return float(np.std(self.statistics, ddof=1) / np.sqrt(self.statistics.size))


def _normal_rows(root: UBMatrix, mu: np.ndarray, n: int, gen: np.random.Generator) -> np.ndarray:
    z = gen.standard_normal((n, root.p))
    return mu[None, :] + ub_apply(root, z)


def sample_ub_normal(sigma: UBMatrix, mu: np.ndarray, n: int, seed: int, index: int = 0) -> Dataset:
    """
    n i.i.d. N(mu, Sigma) rows as mu + Sigma^1/2 z.

    Sigma^1/2 is the UB square root, so no p x p factor is formed.
    """
    root = ub_sqrt(sigma)
    mu = np.asarray(mu, dtype=np.float64)
    gen = rng_service.make_stream(seed, rng_service.SAMPLE_STREAM, index)
    return Dataset(_normal_rows(root, mu, n, gen), sigma.partition)


def sample_dense_normal(sigma: UBMatrix, mu: np.ndarray, n: int, seed: int, index: int = 0) -> Dataset:
    """Reference sampler: mu + L z with L the dense Cholesky factor, same stream as sample_ub_normal."""
    lower = dense_cholesky(ub_expand(sigma))
    if lower is None:
        raise SimulationError("covariance is not positive definite")
    gen = rng_service.make_stream(seed, rng_service.SAMPLE_STREAM, index)
    z = gen.standard_normal((n, sigma.p))
    return Dataset(np.asarray(mu, dtype=np.float64)[None, :] + z @ lower.T, sigma.partition)


def _grouped_rows(root: UBMatrix, means: np.ndarray, sizes: Sequence[int],
                  gen: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    rows = [_normal_rows(root, mean, size, gen) for mean, size in zip(means, sizes)]
    labels = np.repeat(np.arange(1, len(sizes) + 1), sizes)
    return np.vstack(rows), labels


def sample_groups(sigma: UBMatrix, means: np.ndarray, sizes: Sequence[int], seed: int,
                  index: int = 0) -> Dataset:
    """Grouped dataset with labels 1..M, group m drawn from N(means[m], Sigma)."""
    means = np.atleast_2d(np.asarray(means, dtype=np.float64))
    if means.shape[0] != len(sizes):
        raise SimulationError(f"{means.shape[0]} mean vectors for {len(sizes)} groups")
    root = ub_sqrt(sigma)
    gen = rng_service.make_stream(seed, rng_service.SAMPLE_STREAM, index)
    rows, labels = _grouped_rows(root, means, sizes, gen)
    return Dataset(rows, sigma.partition, labels)


def random_spd_ub(partition: PartitionVector, gen: np.random.Generator) -> UBMatrix:
    """Random SPD coordinates: a_kk in U(0.5, 2) and B = G G^T / K."""
    K = partition.K
    a = gen.uniform(0.5, 2.0, K)
    g = gen.standard_normal((K, K))
    return UBMatrix(a, g @ g.T / K, partition)


def replicate_statistics(plan: StudyPlan, workers: Optional[int] = None) -> np.ndarray:
    """The test statistic of every replicate dataset, in replicate order."""
    root = ub_sqrt(plan.sigma)
    partition = plan.sigma.partition

    def run(index: int) -> float:
        gen = rng_service.make_stream(plan.seed, rng_service.STUDY_STREAM, index)
        if plan.is_one_sample:
            data = Dataset(_normal_rows(root, plan.means[0], plan.n, gen), partition)
            return one_sample_statistic(data, plan.mu0, allow_small_n=plan.allow_small_n).statistic
        rows, labels = _grouped_rows(root, plan.means, plan.group_sizes, gen)
        data = Dataset(rows, partition, labels)
        return m_sample_statistic(data, allow_small_n=plan.allow_small_n).statistic

    started = time.perf_counter()
    workers = workers or plan.workers or get_settings().workers
    logger.info("running %d study replicates (seed %d, %d workers)", plan.replicates, plan.seed, workers)
    values = np.asarray(rng_service.ordered_map(run, range(plan.replicates), workers))
    logger.info("study replicates finished in %.3fs", time.perf_counter() - started)
    return values


def _null_law(plan: StudyPlan):
    if plan.is_one_sample:
        return one_sample_null_law(plan.sigma.partition, plan.n)
    return m_sample_null_law(plan.sigma.partition, plan.group_sizes)


def _binomial_summary(hits: int, total: int) -> Tuple[float, float, float, float]:
    rate = hits / total
    se = math.sqrt(rate * (1 - rate) / total)
    return rate, se, max(rate - 1.96 * se, 0.0), min(rate + 1.96 * se, 1.0)


def run_type1_study(plan: StudyPlan) -> StudyResult:
    """
    Empirical rejection rate under H0 at the Monte Carlo critical value.

    Raises:
        SimulationError: if the plan is not under H0
    """
    if plan.is_one_sample:
        if not np.array_equal(plan.means[0], plan.mu0):
            raise SimulationError("type-I study needs mu == mu0")
    elif not np.all(plan.means == plan.means[0]):
        raise SimulationError("type-I study needs equal group means")

    law_replicates = plan.law_replicates or get_settings().mc_replicates
    critical = MonteCarloLaw(_null_law(plan), law_replicates, plan.seed, plan.workers).quantile(plan.alpha).value
    statistics = replicate_statistics(plan)
    rate, se, low, high = _binomial_summary(int(np.sum(statistics > critical)), statistics.size)

    return StudyResult(
        kind="type1",
        rejection_rate=rate,
        standard_error=se,
        ci_low=low,
        ci_high=high,
        critical_value=critical,
        replicates=plan.replicates,
        seed=plan.seed,
        statistics=statistics,
    )


def run_power_study(plan: StudyPlan) -> StudyResult:
    """
    Empirical one-sample power next to the power predicted by the
    noncentral mixture at the same critical value.
    """
    if not plan.is_one_sample:
        raise SimulationError("power studies are defined for the one-sample test")

    law_replicates = plan.law_replicates or get_settings().mc_replicates
    partition = plan.sigma.partition
    critical = MonteCarloLaw(
        one_sample_null_law(partition, plan.n), law_replicates, plan.seed, plan.workers
    ).quantile(plan.alpha).value

    deltas = noncentrality_parameters(plan.means[0], plan.mu0, plan.sigma, plan.n)
    shifted = MonteCarloLaw(noncentral_law(partition, plan.n, deltas), law_replicates, plan.seed, plan.workers)
    predicted = shifted.rejection_probability(critical)
    predicted_se = math.sqrt(predicted * (1 - predicted) / law_replicates)

    statistics = replicate_statistics(plan)
    rate, se, low, high = _binomial_summary(int(np.sum(statistics > critical)), statistics.size)

    return StudyResult(
        kind="power",
        rejection_rate=rate,
        standard_error=se,
        ci_low=low,
        ci_high=high,
        critical_value=critical,
        replicates=plan.replicates,
        seed=plan.seed,
        statistics=statistics,
        predicted_power=predicted,
        predicted_power_se=predicted_se,
        noncentralities=deltas,
    )


@dataclass(frozen=True, eq=False)
class WishartCheck:
    empirical: np.ndarray
    expected: np.ndarray
    max_standardized_error: float


def wishart_mean_check(sigma: UBMatrix, n: int, replicates: int, seed: int) -> WishartCheck:
    """Average (n - 1) S over replicates against its expectation (n - 1) Sigma."""
    if n < 2 or replicates < 1:
        raise SimulationError("Wishart check needs n >= 2 and at least one replicate")
    root = ub_sqrt(sigma)
    mu = np.zeros(sigma.p)
    total = np.zeros((sigma.p, sigma.p))
    for index in range(replicates):
        gen = rng_service.make_stream(seed, rng_service.STUDY_STREAM, index)
        rows = _normal_rows(root, mu, n, gen)
        centered = rows - rows.mean(axis=0)
        total += centered.T @ centered

    dense = ub_expand(sigma)
    expected = (n - 1) * dense
    empirical = total / replicates
    variance = (n - 1) * (dense ** 2 + np.outer(np.diag(dense), np.diag(dense)))
    errors = np.abs(empirical - expected) / np.sqrt(variance / replicates)
    return WishartCheck(empirical=empirical, expected=expected, max_standardized_error=float(np.max(errors)))
