"""
Unit tests for F-mixture laws.

Tests sampling determinism, Monte Carlo quantiles and p-values against
scipy's F distribution, and the two-moment scaled-F approximation.
"""

import numpy as np
import pytest
import scipy.stats

from ubmat.service.inference import m_sample_null_law, one_sample_null_law
from ubmat.service.mixture import (
    ApproximationUnavailableError,
    FMixture,
    FTerm,
    HotellingT0,
    InferenceError,
    MonteCarloLaw,
    mixture_moments,
    mixture_quantile,
    mixture_sample,
    morrison_approximation,
    p_value,
    p_value_from_sorted,
    quantile_from_sorted,
)
from ubmat.service.ub_matrix import PartitionVector


@pytest.fixture
def single_f():
    """A law holding one F(3, 30)."""
    return FMixture(terms=(FTerm(1.0, 3.0, 30.0),))


@pytest.fixture
def one_sample_law():
    return one_sample_null_law(PartitionVector((3, 4, 5)), 50)


class TestFTerm:
    """Tests for single F terms."""

    def test_invalid_degrees_of_freedom(self):
        """Test that non-positive df are rejected."""
        with pytest.raises(InferenceError):
            FTerm(1.0, 0.0, 10.0)

    def test_negative_noncentrality(self):
        """Test that a negative noncentrality is rejected."""
        with pytest.raises(InferenceError):
            FTerm(1.0, 2.0, 10.0, noncentrality=-1.0)

    def test_central_moments_match_scipy(self):
        """Test the closed-form mean and variance of c F(d1, d2)."""
        term = FTerm(2.5, 4.0, 20.0)
        mean, var = scipy.stats.f.stats(4.0, 20.0, moments="mv")
        assert term.mean() == pytest.approx(2.5 * float(mean), rel=1e-12)
        assert term.variance() == pytest.approx(2.5 ** 2 * float(var), rel=1e-12)

    def test_noncentral_moments_match_scipy(self):
        """Test noncentral moments with lambda = 2 delta."""
        term = FTerm(1.0, 4.0, 20.0, noncentrality=1.5)
        mean, var = scipy.stats.ncf.stats(4.0, 20.0, 3.0, moments="mv")
        assert term.mean() == pytest.approx(float(mean), rel=1e-10)
        assert term.variance() == pytest.approx(float(var), rel=1e-10)

    def test_infinite_moments(self):
        """Test that moments without a finite value report infinity."""
        term = FTerm(1.0, 3.0, 4.0)
        assert np.isfinite(term.mean())
        assert term.variance() == np.inf


class TestHotelling:
    """Tests for the T0^2 component."""

    def test_requires_error_df(self):
        """Test that error_df must reach the dimension."""
        with pytest.raises(InferenceError):
            HotellingT0(dimension=4, hypothesis_df=2, error_df=3)

    def test_one_dimensional_is_scaled_f(self):
        """Test that T0^2 with dimension 1 is h F(h, e)."""
        law = FMixture(terms=(), hotelling=HotellingT0(dimension=1, hypothesis_df=3, error_df=20))
        estimate = mixture_quantile(law, 0.05, 200_000, seed=3)
        assert estimate.value == pytest.approx(3 * scipy.stats.f.isf(0.05, 3, 20), rel=0.03)

    def test_two_sample_is_scaled_f(self):
        """Test the M = 2 component against K(n - 2)/(n - K - 1) F(K, n - K - 1)."""
        K, n = 3, 40
        law = m_sample_null_law(PartitionVector((2, 3, 4)), (20, 20))
        assert law.hotelling == HotellingT0(dimension=K, hypothesis_df=1, error_df=n - 2)
        estimate = mixture_quantile(FMixture(terms=(), hotelling=law.hotelling), 0.05, 200_000, seed=9)
        closed_form = K * (n - 2) / (n - K - 1) * scipy.stats.f.isf(0.05, K, n - K - 1)
        assert estimate.value == pytest.approx(closed_form, rel=0.03)

    def test_mean(self):
        """Test the sample mean of T0^2 against e h m / (e - m - 1)."""
        t0 = HotellingT0(dimension=2, hypothesis_df=2, error_df=30)
        draws = t0.sample(np.random.default_rng(4), 100_000)
        assert draws.mean() == pytest.approx(t0.mean(), rel=0.03)


class TestSampling:
    """Tests for reproducible mixture sampling."""

    def test_same_seed_same_draws(self, one_sample_law):
        """Test that a seed fixes the draws."""
        first = mixture_sample(one_sample_law, 5000, seed=9)
        second = mixture_sample(one_sample_law, 5000, seed=9)
        np.testing.assert_array_equal(first, second)

    def test_different_seed_different_draws(self, one_sample_law):
        """Test that another seed changes the draws."""
        first = mixture_sample(one_sample_law, 1000, seed=9)
        second = mixture_sample(one_sample_law, 1000, seed=10)
        assert not np.array_equal(first, second)

    def test_workers_do_not_change_draws(self):
        """Test that threading leaves the draws unchanged."""
        law = m_sample_null_law(PartitionVector((2, 3)), (10, 10, 10))
        serial = mixture_sample(law, 3000, seed=1, workers=1, block_size=256)
        threaded = mixture_sample(law, 3000, seed=1, workers=4, block_size=256)
        np.testing.assert_array_equal(serial, threaded)

    def test_draws_are_positive(self, one_sample_law):
        """Test that the law lives on the positive half-line."""
        assert np.all(mixture_sample(one_sample_law, 2000, seed=2) > 0)


class TestQuantiles:
    """Tests for Monte Carlo quantiles and p-values."""

    def test_order_statistic(self):
        """Test that the quantile is the ceil((1 - alpha) R)-th order statistic."""
        draws = np.arange(1.0, 101.0)
        estimate = quantile_from_sorted(draws, 0.05)
        assert estimate.value == 95.0
        assert estimate.lower <= estimate.value <= estimate.upper

    def test_p_value_counts(self):
        """Test (#draws >= observed + 1) / (R + 1)."""
        draws = np.arange(100.0)
        assert p_value_from_sorted(draws, 99.5) == pytest.approx(1 / 101)
        assert p_value_from_sorted(draws, -1.0) == 1.0
        assert p_value_from_sorted(draws, 50.0) == pytest.approx(51 / 101)

    def test_p_value_nonincreasing(self, one_sample_law):
        """Test that p-values do not grow with the observed statistic."""
        sampled = MonteCarloLaw(one_sample_law, 5000, seed=11)
        values = [sampled.p_value(x) for x in np.linspace(0.0, 40.0, 81)]
        assert all(later <= earlier for earlier, later in zip(values, values[1:]))

    def test_single_f_quantile_matches_scipy(self, single_f):
        """Test the Monte Carlo quantile against scipy."""
        estimate = mixture_quantile(single_f, 0.05, 200_000, seed=7)
        assert estimate.value == pytest.approx(scipy.stats.f.isf(0.05, 3, 30), rel=0.03)
        assert estimate.standard_error > 0

    def test_single_f_p_value_matches_scipy(self, single_f):
        """Test the Monte Carlo p-value against scipy."""
        observed = 2.0
        assert p_value(single_f, observed, 200_000, seed=8) == pytest.approx(
            scipy.stats.f.sf(observed, 3, 30), abs=0.005
        )

    def test_invalid_alpha(self, single_f):
        """Test that alpha outside (0, 1) is rejected."""
        with pytest.raises(InferenceError):
            mixture_quantile(single_f, 1.5, 100, seed=1)

    def test_rejection_probability(self, single_f):
        """Test the tail fraction at a critical value."""
        sampled = MonteCarloLaw(single_f, 100_000, seed=6)
        critical = scipy.stats.f.isf(0.1, 3, 30)
        assert sampled.rejection_probability(critical) == pytest.approx(0.1, abs=0.006)


class TestMoments:
    """Tests for law moments and the scaled-F approximation."""

    def test_moments_add_over_terms(self, one_sample_law):
        """Test that the law moments are sums of term moments."""
        mean, variance = mixture_moments(one_sample_law)
        assert mean == pytest.approx(sum(t.mean() for t in one_sample_law.terms), rel=1e-12)
        assert variance == pytest.approx(sum(t.variance() for t in one_sample_law.terms), rel=1e-12)

    def test_morrison_matches_two_moments(self, one_sample_law):
        """Test that C1 F(p, C2) reproduces the law's mean and variance."""
        approx = morrison_approximation(one_sample_law)
        mean, variance = approx.moments()
        assert mean == pytest.approx(approx.mean, rel=1e-10)
        assert variance == pytest.approx(approx.variance, rel=1e-10)
        assert approx.dimension == 12

    def test_morrison_quantile_close_to_monte_carlo(self):
        """Test the scaled F against 500k draws of the p = (3, 4), n = 50 law."""
        law = one_sample_null_law(PartitionVector((3, 4)), 50)
        approx = morrison_approximation(law)
        mean, variance = mixture_moments(law)
        assert approx.moments()[0] == pytest.approx(mean, rel=1e-10)
        assert approx.moments()[1] == pytest.approx(variance, rel=1e-10)
        simulated = mixture_quantile(law, 0.05, 500_000, seed=12)
        assert approx.quantile(0.05) == pytest.approx(simulated.value, rel=0.05)
        assert approx.sf(approx.quantile(0.05)) == pytest.approx(0.05, rel=1e-8)

    def test_morrison_quantile_close_on_larger_law(self, one_sample_law):
        """Test the scaled F against draws of the p = (3, 4, 5) law."""
        approx = morrison_approximation(one_sample_law)
        simulated = mixture_quantile(one_sample_law, 0.05, 100_000, seed=12)
        assert approx.quantile(0.05) == pytest.approx(simulated.value, rel=0.1)

    def test_morrison_unavailable_for_small_df2(self):
        """Test that df2 <= 4 has no finite variance to match."""
        law = FMixture(terms=(FTerm(1.0, 1.0, 4.0),))
        with pytest.raises(ApproximationUnavailableError):
            morrison_approximation(law)

    def test_morrison_with_hotelling(self):
        """Test the approximation when T0^2 moments come from draws."""
        law = m_sample_null_law(PartitionVector((3, 4)), (20, 20, 20))
        approx = morrison_approximation(law, replicates=20_000, seed=3)
        assert approx.c1 > 0
        assert approx.c2 > 4
        assert approx.dimension == 14

    def test_noncentral_law_needs_no_hotelling(self):
        """Test that noncentralities cannot be attached to a T0^2 law."""
        law = m_sample_null_law(PartitionVector((2, 2)), (10, 10))
        with pytest.raises(InferenceError):
            law.with_noncentralities([0.0, 0.0])

    def test_noncentral_shifts_mean(self, one_sample_law):
        """Test that noncentrality raises the mean."""
        shifted = one_sample_law.with_noncentralities([0.0, 0.0, 0.0, 2.0])
        assert not shifted.is_central
        assert mixture_moments(shifted)[0] > mixture_moments(one_sample_law)[0]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
