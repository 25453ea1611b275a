"""
F-mixture null laws: sampling, Monte Carlo quantiles and p-values, and the
two-moment scaled-F approximation.

A law is a weighted sum of independent (possibly noncentral) F variates,
optionally plus a Hotelling-Lawley trace component T0^2 that has no closed
form and is only ever sampled.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from ubmat.core.config import get_settings
from ubmat.core.errors import UBMatError
from ubmat.service import rng as rng_service

logger = logging.getLogger(__name__)

BRACKET_Z = float(scipy.stats.norm.ppf(0.975))


class InferenceError(UBMatError):
    """Invalid law, statistic input or test configuration."""
    pass


class ApproximationUnavailableError(InferenceError):
    """The two-moment approximation needs finite variances (every df2 > 4)."""
    pass


@dataclass(frozen=True)
class FTerm:
    """coefficient * F(df1, df2; noncentrality), noncentral in the numerator only."""

    coefficient: float
    df1: float
    df2: float
    noncentrality: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not (self.df1 > 0 and self.df2 > 0):
            raise InferenceError(f"F term needs positive degrees of freedom, got ({self.df1}, {self.df2})")
        if self.noncentrality < 0:
            raise InferenceError(f"noncentrality must be non-negative, got {self.noncentrality}")
        if not math.isfinite(self.coefficient):
            raise InferenceError("F term coefficient must be finite")

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        if self.coefficient == 0:
            return np.zeros(size)
        if self.noncentrality > 0:
            numerator = gen.noncentral_chisquare(self.df1, 2.0 * self.noncentrality, size)
        else:
            numerator = gen.chisquare(self.df1, size)
        denominator = gen.chisquare(self.df2, size)
        return self.coefficient * (numerator / self.df1) / (denominator / self.df2)

    def mean(self) -> float:
        if self.df2 <= 2:
            return math.inf
        lam = 2.0 * self.noncentrality
        return self.coefficient * self.df2 * (self.df1 + lam) / (self.df1 * (self.df2 - 2))

    def variance(self) -> float:
        if self.df2 <= 4:
            return math.inf
        d1, d2, lam = self.df1, self.df2, 2.0 * self.noncentrality
        var = (
            2.0 * (d2 / d1) ** 2 * ((d1 + lam) ** 2 + (d1 + 2 * lam) * (d2 - 2))
            / ((d2 - 2) ** 2 * (d2 - 4))
        )
        return self.coefficient ** 2 * var


@dataclass(frozen=True)
class HotellingT0:
    """
    Hotelling-Lawley trace error_df * tr(E^-1 H) with E ~ W_dim(error_df, I)
    and H ~ W_dim(hypothesis_df, I) independent.
    """

    dimension: int
    hypothesis_df: int
    error_df: int

    def __post_init__(self):
        if self.dimension < 1 or self.hypothesis_df < 1:
            raise InferenceError("Hotelling T0^2 needs dimension >= 1 and hypothesis_df >= 1")
        if self.error_df < self.dimension:
            raise InferenceError(
                f"Hotelling T0^2 needs error_df >= dimension ({self.error_df} < {self.dimension})"
            )

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        # Bartlett decomposition E = T T^T; tr(E^-1 H) = |T^-1 Z|_F^2 with H = Z Z^T
        dim = self.dimension
        lower = np.zeros((size, dim, dim))
        for i in range(dim):
            lower[:, i, i] = np.sqrt(gen.chisquare(self.error_df - i, size))
            if i:
                lower[:, i, :i] = gen.standard_normal((size, i))
        z = gen.standard_normal((size, dim, self.hypothesis_df))
        solved = np.linalg.solve(lower, z)
        return self.error_df * np.sum(solved * solved, axis=(1, 2))

    def mean(self) -> float:
        if self.error_df - self.dimension - 1 <= 0:
            return math.inf
        return self.error_df * self.hypothesis_df * self.dimension / (self.error_df - self.dimension - 1)


@dataclass(frozen=True)
class FMixture:
    """Sum of independent F terms plus an optional T0^2 component."""

    terms: Tuple[FTerm, ...]
    hotelling: Optional[HotellingT0] = None
    dimension: Optional[int] = None

    @property
    def numerator_df(self) -> float:
        """Numerator degrees of freedom of the approximating scaled F."""
        if self.dimension is not None:
            return float(self.dimension)
        total = sum(t.df1 for t in self.terms)
        if self.hotelling is not None:
            total += self.hotelling.dimension * self.hotelling.hypothesis_df
        return float(total)

    @property
    def is_central(self) -> bool:
        return all(t.noncentrality == 0 for t in self.terms)

    def with_noncentralities(self, deltas: Sequence[float]) -> "FMixture":
        if self.hotelling is not None:
            raise InferenceError("noncentral laws are only defined without a T0^2 component")
        if len(deltas) != len(self.terms):
            raise InferenceError(f"expected {len(self.terms)} noncentralities, got {len(deltas)}")
        terms = tuple(
            FTerm(t.coefficient, t.df1, t.df2, float(d), t.label)
            for t, d in zip(self.terms, deltas)
        )
        return FMixture(terms=terms, hotelling=None, dimension=self.dimension)


@dataclass(frozen=True)
class QuantileEstimate:
    """Upper-alpha Monte Carlo quantile with a binomial bracketing standard error."""

    value: float
    standard_error: float
    lower: float
    upper: float
    alpha: float
    replicates: int
    seed: int


def _sample_block(law: FMixture, seed: int, block: Tuple[int, int, int]) -> np.ndarray:
    index, start, stop = block
    gen = rng_service.make_stream(seed, rng_service.MIXTURE_STREAM, index)
    size = stop - start
    total = np.zeros(size)
    for term in law.terms:
        total += term.sample(gen, size)
    if law.hotelling is not None:
        total += law.hotelling.sample(gen, size)
    return total


def mixture_sample(law: FMixture, replicates: int, seed: int,
                   workers: Optional[int] = None, block_size: Optional[int] = None) -> np.ndarray:
    """
    Draw ``replicates`` i.i.d. values of the law.

    Replicates are cut into fixed-size blocks and every block draws from its
    own stream, so the output depends only on (law, replicates, seed, block_size).
    """
    settings = get_settings()
    workers = workers or settings.workers
    block_size = block_size or settings.mc_block_size
    blocks = rng_service.block_ranges(replicates, block_size)

    started = time.perf_counter()
    logger.info("sampling mixture: %d replicates, seed %d, %d workers", replicates, seed, workers)
    parts = rng_service.ordered_map(lambda block: _sample_block(law, seed, block), blocks, workers)
    draws = np.concatenate(parts)
    logger.info("sampled %d replicates in %.3fs", replicates, time.perf_counter() - started)
    return draws


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise InferenceError(f"alpha must lie in (0, 1), got {alpha}")


def quantile_from_sorted(draws: np.ndarray, alpha: float, seed: int = 0) -> QuantileEstimate:
    """Order statistic at ceil((1 - alpha) R) of already sorted draws."""
    _check_alpha(alpha)
    size = draws.size
    index = min(max(math.ceil((1 - alpha) * size - 1e-9) - 1, 0), size - 1)
    half = BRACKET_Z * math.sqrt(size * alpha * (1 - alpha))
    low = max(int(math.floor(index - half)), 0)
    high = min(int(math.ceil(index + half)), size - 1)
    lower, upper = float(draws[low]), float(draws[high])
    return QuantileEstimate(
        value=float(draws[index]),
        standard_error=(upper - lower) / (2 * BRACKET_Z),
        lower=lower,
        upper=upper,
        alpha=alpha,
        replicates=size,
        seed=seed,
    )


def p_value_from_sorted(draws: np.ndarray, observed: float) -> float:
    """(#draws >= observed + 1) / (R + 1)."""
    exceed = draws.size - int(np.searchsorted(draws, observed, side="left"))
    return (exceed + 1) / (draws.size + 1)


class MonteCarloLaw:
    """Sorted draws of a law, sampled once and reused for quantiles and p-values."""

    def __init__(self, law: FMixture, replicates: int, seed: int, workers: Optional[int] = None):
        self.law = law
        self.replicates = replicates
        self.seed = seed
        self.draws = np.sort(mixture_sample(law, replicates, seed, workers))

    def quantile(self, alpha: float) -> QuantileEstimate:
        return quantile_from_sorted(self.draws, alpha, self.seed)

    def p_value(self, observed: float) -> float:
        return p_value_from_sorted(self.draws, observed)

    def rejection_probability(self, critical_value: float) -> float:
        """Fraction of draws strictly above ``critical_value``."""
        above = self.draws.size - int(np.searchsorted(self.draws, critical_value, side="right"))
        return above / self.draws.size


def mixture_quantile(law: FMixture, alpha: float, replicates: int, seed: int,
                     workers: Optional[int] = None) -> QuantileEstimate:
    _check_alpha(alpha)
    return MonteCarloLaw(law, replicates, seed, workers).quantile(alpha)


def p_value(law: FMixture, observed: float, replicates: int, seed: int,
            workers: Optional[int] = None) -> float:
    if observed < 0:
        raise InferenceError(f"observed statistic must be non-negative, got {observed}")
    return MonteCarloLaw(law, replicates, seed, workers).p_value(observed)


def mixture_moments(law: FMixture, replicates: Optional[int] = None,
                    seed: Optional[int] = None) -> Tuple[float, float]:
    """
    Mean and variance of the law.

    F terms use the closed-form (noncentral) F moments; a T0^2 component
    contributes the sample mean and variance of its own Monte Carlo draws.
    """
    mean = sum(t.mean() for t in law.terms)
    variance = sum(t.variance() for t in law.terms)

    if law.hotelling is not None:
        settings = get_settings()
        replicates = replicates or settings.mc_replicates
        seed = settings.seed if seed is None else seed
        gen = rng_service.make_stream(seed, rng_service.MOMENT_STREAM)
        draws = law.hotelling.sample(gen, replicates)
        mean += float(np.mean(draws))
        variance += float(np.var(draws, ddof=1))

    return mean, variance


@dataclass(frozen=True)
class MorrisonApproximation:
    """C1 * F(dimension, C2) matching the first two moments of a mixture."""

    c1: float
    c2: float
    dimension: float
    mean: float
    variance: float

    def quantile(self, alpha: float) -> float:
        _check_alpha(alpha)
        return self.c1 * float(scipy.stats.f.isf(alpha, self.dimension, self.c2))

    def sf(self, x: float) -> float:
        return float(scipy.stats.f.sf(x / self.c1, self.dimension, self.c2))

    def moments(self) -> Tuple[float, float]:
        """Mean and variance of C1 F(dimension, C2)."""
        p, d = self.dimension, self.c2
        mean = self.c1 * d / (d - 2)
        var = self.c1 ** 2 * 2 * d * d * (p + d - 2) / (p * (d - 2) ** 2 * (d - 4))
        return mean, var


def morrison_approximation(law: FMixture, replicates: Optional[int] = None,
                           seed: Optional[int] = None) -> MorrisonApproximation:
    """
    Solve for (C1, C2) so that C1 F(p, C2) has the mixture's mean and variance.

    With r = variance / mean^2 the scaled F requires
    C2 = (4 r p + 2 p - 4) / (r p - 2) and C1 = mean (C2 - 2) / C2.

    Raises:
        ApproximationUnavailableError: if a term has df2 <= 4 or r p <= 2
    """
    short = [t for t in law.terms if t.df2 <= 4]
    if short:
        raise ApproximationUnavailableError(
            f"two-moment approximation needs every df2 > 4 (found {short[0].df2:g})"
        )
    if law.hotelling is not None and law.hotelling.error_df - law.hotelling.dimension <= 3:
        raise ApproximationUnavailableError("T0^2 component has no finite variance at these degrees of freedom")

    mean, variance = mixture_moments(law, replicates, seed)
    p = law.numerator_df
    ratio = variance / mean ** 2
    if ratio * p <= 2:
        raise ApproximationUnavailableError(
            f"variance/mean^2 = {ratio:.6g} is too small for an F with {p:g} numerator df"
        )
    c2 = (4 * ratio * p + 2 * p - 4) / (ratio * p - 2)
    c1 = mean * (c2 - 2) / c2
    logger.debug("morrison approximation: C1=%.6g C2=%.6g p=%g", c1, c2, p)
    return MorrisonApproximation(c1=c1, c2=c2, dimension=p, mean=mean, variance=variance)
