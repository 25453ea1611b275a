"""
Information tests for mean vectors under a UB covariance.

The one-sample statistic U = n (Xbar - mu0)^T Theta-hat (Xbar - mu0) and the
M-sample statistic U_M = sum_m n_m (Xbar_m - Xbar)^T Theta-hat (Xbar_m - Xbar)
both split into K within-block terms (centered parts of each block) and one
term on the K block averages. The null law of each statistic is the matching
sum of independent F variates plus a Hotelling term.
"""

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ubmat.core.config import Tolerances, get_settings
from ubmat.service.estimation import (
    Dataset,
    SampleMoments,
    block_average_covariance,
    estimate_coordinates,
    estimate_precision,
    sample_moments,
)
from ubmat.service.mixture import (
    FMixture,
    FTerm,
    HotellingT0,
    InferenceError,
    MonteCarloLaw,
    morrison_approximation,
)
from ubmat.service.ub_matrix import (
    PartitionMismatchError,
    PartitionVector,
    UBMatrix,
    ensure_positive_definite,
    ub_quadratic_form,
)

logger = logging.getLogger(__name__)

DECOMPOSITION_TOL = 1e-10


class TestMethod(str, enum.Enum):
    """How the null law is evaluated."""

    __test__ = False

    MONTE_CARLO = "monte_carlo"
    MORRISON = "morrison_approx"


@dataclass(frozen=True, eq=False)
class StatisticResult:
    """A test statistic, its K + 1 components and the estimates behind it."""

    statistic: float
    components: np.ndarray
    estimate: UBMatrix
    precision: UBMatrix
    moments: SampleMoments

    @property
    def decomposition_residual(self) -> float:
        return abs(self.statistic - float(np.sum(self.components)))


@dataclass(frozen=True, eq=False)
class TestOutcome:
    """A completed test: statistic, null law and the tail evaluation."""

    __test__ = False

    statistic: StatisticResult
    law: FMixture
    alpha: float
    method: TestMethod
    critical_value: float
    critical_value_se: Optional[float]
    p_value: float
    replicates: Optional[int]
    seed: Optional[int]
    morrison: Optional[Tuple[float, float]] = None

    @property
    def reject(self) -> bool:
        return self.statistic.statistic > self.critical_value


@dataclass(frozen=True)
class ConfidenceInterval:
    center: float
    half_width: float
    critical_value: float
    alpha: float

    @property
    def low(self) -> float:
        return self.center - self.half_width

    @property
    def high(self) -> float:
        return self.center + self.half_width


def _within_block_squares(partition: PartitionVector, v: np.ndarray) -> np.ndarray:
    """|C_k v_k|^2 = |v_k|^2 - (sum v_k)^2 / p_k for each block (row-wise for 2-D input)."""
    sums = partition.block_sums(v)
    return partition.block_sums(v * v) - sums * sums / partition.array


def _solve_block_averages(sigma_y: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(sigma_y, rhs)
    except np.linalg.LinAlgError:
        raise InferenceError("block-average covariance is singular")


def _check_mean(mu0: np.ndarray, partition: PartitionVector) -> np.ndarray:
    mu0 = np.asarray(mu0, dtype=np.float64).reshape(-1)
    if mu0.shape != (partition.total,):
        raise PartitionMismatchError(f"mu0 has {mu0.size} entries but p = {partition.total}")
    return mu0


def one_sample_statistic(d: Dataset, mu0: np.ndarray, tol: Optional[Tolerances] = None,
                         allow_small_n: Optional[bool] = None) -> StatisticResult:
    """
    Geisser's one-sample information statistic.

    U is evaluated in coordinates as n * v^T Theta-hat v with v = Xbar - mu0.
    Components are F_k = n |C_k v_k|^2 / a-hat_kk for k = 1..K and
    F_{K+1} = n ybar^T Sigma-hat_y^-1 ybar with ybar the block averages of v.
    """
    partition = d.partition
    mu0 = _check_mean(mu0, partition)
    moments = sample_moments(d.ungrouped())
    estimate = estimate_coordinates(moments, partition, allow_small_n)
    precision = estimate_precision(estimate, tol)

    n = moments.n
    diff = moments.mean - mu0
    statistic = n * ub_quadratic_form(precision, diff)

    within = n * _within_block_squares(partition, diff) / estimate.a
    ybar = partition.block_sums(diff) / partition.array
    sigma_y = block_average_covariance(estimate)
    between = n * float(ybar @ _solve_block_averages(sigma_y, ybar))
    components = np.append(within, between)

    result = StatisticResult(statistic, components, estimate, precision, moments)
    _check_decomposition(result)
    return result


def m_sample_statistic(d: Dataset, tol: Optional[Tolerances] = None,
                       allow_small_n: Optional[bool] = None) -> StatisticResult:
    """
    Geisser's M-sample information statistic on pooled estimates.

    Components are F_k = sum_m n_m |C_k w_mk|^2 / a-hat_kk with
    w_m = Xbar_m - Xbar, and F_{K+1} = tr[Sigma-hat_y^-1 sum_m n_m ybar_m ybar_m^T].

    Raises:
        InferenceError: if the data are not grouped into at least two groups
    """
    if not d.is_grouped or d.M < 2:
        raise InferenceError("the M-sample test needs group labels with at least two groups")

    partition = d.partition
    moments = sample_moments(d)
    estimate = estimate_coordinates(moments, partition, allow_small_n)
    precision = estimate_precision(estimate, tol)

    weights = np.asarray(moments.group_sizes, dtype=np.float64)
    deviations = moments.group_means - moments.mean
    statistic = float(weights @ ub_quadratic_form(precision, deviations))

    within = weights @ _within_block_squares(partition, deviations) / estimate.a
    ybar = partition.block_sums(deviations) / partition.array
    hypothesis = (ybar * weights[:, None]).T @ ybar
    sigma_y = block_average_covariance(estimate)
    between = float(np.trace(_solve_block_averages(sigma_y, hypothesis)))
    components = np.append(within, between)

    result = StatisticResult(statistic, components, estimate, precision, moments)
    _check_decomposition(result)
    return result


def two_sample_difference_statistic(d: Dataset, tol: Optional[Tolerances] = None,
                                    allow_small_n: Optional[bool] = None) -> float:
    """(n_1 n_2 / n) (Xbar_1 - Xbar_2)^T Theta-hat (Xbar_1 - Xbar_2) for two groups."""
    if not d.is_grouped or d.M != 2:
        raise InferenceError("the two-sample form needs exactly two groups")
    moments = sample_moments(d)
    estimate = estimate_coordinates(moments, d.partition, allow_small_n)
    precision = estimate_precision(estimate, tol)
    n1, n2 = moments.group_sizes
    diff = moments.group_means[0] - moments.group_means[1]
    return n1 * n2 / (n1 + n2) * ub_quadratic_form(precision, diff)


def _check_decomposition(result: StatisticResult) -> None:
    scale = max(1.0, abs(result.statistic))
    if result.decomposition_residual > DECOMPOSITION_TOL * scale:
        logger.warning(
            "statistic %.12g differs from its component sum by %.3e",
            result.statistic, result.decomposition_residual
        )


def one_sample_null_law(partition: PartitionVector, n: int) -> FMixture:
    """
    sum_k (p_k - 1) F(p_k - 1, (p_k - 1)(n - 1)) + K(n - 1)/(n - K) F(K, n - K).

    The law itself only needs n > K. Statistics computed from data also
    need n > K + K(K+1)/2, which estimate_coordinates enforces unless
    allow_small_n is set.

    Raises:
        InferenceError: if n <= K
    """
    K = partition.K
    if n <= K:
        raise InferenceError(f"one-sample law needs n > K (n = {n}, K = {K})")

    terms = [
        FTerm(size - 1.0, size - 1.0, (size - 1.0) * (n - 1), label=f"block {k + 1}")
        for k, size in enumerate(partition.sizes)
    ]
    terms.append(FTerm(K * (n - 1.0) / (n - K), float(K), float(n - K), label="block averages"))
    return FMixture(terms=tuple(terms), dimension=partition.total)


def m_sample_null_law(partition: PartitionVector, group_sizes: Sequence[int]) -> FMixture:
    """
    sum_k (M-1)(p_k-1) F((M-1)(p_k-1), (n-M)(p_k-1)) + T0^2(K; M-1, n-M).

    Raises:
        InferenceError: if M < 2 or n - M < K
    """
    M = len(group_sizes)
    n = int(sum(group_sizes))
    K = partition.K
    if M < 2 or min(group_sizes) < 1:
        raise InferenceError("M-sample law needs at least two non-empty groups")
    if n - M < K:
        raise InferenceError(f"M-sample law needs n - M >= K (n = {n}, M = {M}, K = {K})")

    terms = tuple(
        FTerm((M - 1.0) * (size - 1), (M - 1.0) * (size - 1), (n - M) * (size - 1.0), label=f"block {k + 1}")
        for k, size in enumerate(partition.sizes)
    )
    return FMixture(
        terms=terms,
        hotelling=HotellingT0(dimension=K, hypothesis_df=M - 1, error_df=n - M),
        dimension=(M - 1) * partition.total,
    )


def noncentrality_parameters(mu: np.ndarray, mu0: np.ndarray, sigma: UBMatrix, n: int) -> np.ndarray:
    """
    delta_1..delta_K and delta_{K+1} of the one-sample law under mu.

    delta_k = n |C_k (mu - mu0)_k|^2 / (2 a_kk) and
    delta_{K+1} = n (mu_y - nu0)^T Sigma_y^-1 (mu_y - nu0) / 2.
    """
    ensure_positive_definite(sigma, "noncentrality")
    partition = sigma.partition
    diff = _check_mean(mu, partition) - _check_mean(mu0, partition)

    within = 0.5 * n * _within_block_squares(partition, diff) / sigma.a
    ybar = partition.block_sums(diff) / partition.array
    sigma_y = block_average_covariance(sigma)
    between = 0.5 * n * float(ybar @ _solve_block_averages(sigma_y, ybar))
    return np.maximum(np.append(within, between), 0.0)


def noncentral_law(partition: PartitionVector, n: int, deltas: Sequence[float]) -> FMixture:
    """One-sample law with noncentral numerators."""
    return one_sample_null_law(partition, n).with_noncentralities(deltas)


def _evaluate(statistic: StatisticResult, law: FMixture, alpha: float, method: TestMethod,
              replicates: Optional[int], seed: Optional[int], workers: Optional[int]) -> TestOutcome:
    settings = get_settings()
    replicates = replicates or settings.mc_replicates
    seed = settings.seed if seed is None else seed
    observed = max(statistic.statistic, 0.0)

    if method == TestMethod.MONTE_CARLO:
        sampled = MonteCarloLaw(law, replicates, seed, workers)
        quantile = sampled.quantile(alpha)
        return TestOutcome(
            statistic=statistic,
            law=law,
            alpha=alpha,
            method=method,
            critical_value=quantile.value,
            critical_value_se=quantile.standard_error,
            p_value=sampled.p_value(observed),
            replicates=replicates,
            seed=seed,
        )

    approx = morrison_approximation(law, replicates, seed)
    uses_draws = law.hotelling is not None
    return TestOutcome(
        statistic=statistic,
        law=law,
        alpha=alpha,
        method=method,
        critical_value=approx.quantile(alpha),
        critical_value_se=None,
        p_value=approx.sf(observed),
        replicates=replicates if uses_draws else None,
        seed=seed if uses_draws else None,
        morrison=(approx.c1, approx.c2),
    )


def run_one_sample_test(d: Dataset, mu0: np.ndarray, alpha: Optional[float] = None,
                        method: TestMethod = TestMethod.MONTE_CARLO,
                        replicates: Optional[int] = None, seed: Optional[int] = None,
                        workers: Optional[int] = None, tol: Optional[Tolerances] = None,
                        allow_small_n: Optional[bool] = None) -> TestOutcome:
    """Statistic, null law and tail evaluation for H0: mu = mu0."""
    alpha = get_settings().alpha if alpha is None else alpha
    statistic = one_sample_statistic(d, mu0, tol, allow_small_n)
    law = one_sample_null_law(d.partition, statistic.moments.n)
    return _evaluate(statistic, law, alpha, TestMethod(method), replicates, seed, workers)


def run_m_sample_test(d: Dataset, alpha: Optional[float] = None,
                      method: TestMethod = TestMethod.MONTE_CARLO,
                      replicates: Optional[int] = None, seed: Optional[int] = None,
                      workers: Optional[int] = None, tol: Optional[Tolerances] = None,
                      allow_small_n: Optional[bool] = None) -> TestOutcome:
    """Statistic, null law and tail evaluation for H0: mu_1 = ... = mu_M."""
    alpha = get_settings().alpha if alpha is None else alpha
    statistic = m_sample_statistic(d, tol, allow_small_n)
    law = m_sample_null_law(d.partition, statistic.moments.group_sizes)
    return _evaluate(statistic, law, alpha, TestMethod(method), replicates, seed, workers)


def simultaneous_ci(d: Dataset, a: np.ndarray, alpha: Optional[float] = None,
                    critical_value: Optional[float] = None,
                    method: TestMethod = TestMethod.MONTE_CARLO,
                    replicates: Optional[int] = None, seed: Optional[int] = None,
                    workers: Optional[int] = None,
                    allow_small_n: Optional[bool] = None) -> ConfidenceInterval:
    """
    a^T Xbar +- sqrt(U(alpha) a^T Sigma-hat a / n).

    ``critical_value`` skips the law evaluation when the caller already has U(alpha).
    """
    settings = get_settings()
    alpha = settings.alpha if alpha is None else alpha
    a = _check_mean(a, d.partition)
    moments = sample_moments(d.ungrouped())
    estimate = estimate_coordinates(moments, d.partition, allow_small_n)

    if critical_value is None:
        law = one_sample_null_law(d.partition, moments.n)
        if TestMethod(method) == TestMethod.MORRISON:
            critical_value = morrison_approximation(law).quantile(alpha)
        else:
            replicates = replicates or settings.mc_replicates
            seed = settings.seed if seed is None else seed
            critical_value = MonteCarloLaw(law, replicates, seed, workers).quantile(alpha).value

    spread = max(ub_quadratic_form(estimate, a), 0.0)
    half_width = float(np.sqrt(critical_value * spread / moments.n))
    return ConfidenceInterval(
        center=float(a @ moments.mean),
        half_width=half_width,
        critical_value=float(critical_value),
        alpha=alpha,
    )
