"""
Unit tests for the coordinate versus dense benchmark.
"""

import pytest

from ubmat.core.config import get_settings
from ubmat.service.benchmark import (
    PRESETS,
    BenchmarkError,
    BenchTiming,
    near_even_partition,
    resolve_grid,
    run_benchmark,
)


class TestGrid:
    """Tests for partitions and grids."""

    def test_near_even_partition(self):
        """Test sizes that differ by at most one."""
        sizes = near_even_partition(107, 7).sizes
        assert sum(sizes) == 107
        assert max(sizes) - min(sizes) <= 1

    def test_partition_too_fine(self):
        """Test that blocks of size one are refused."""
        with pytest.raises(BenchmarkError):
            near_even_partition(5, 3)

    def test_resolve_grid(self):
        """Test presets then explicit pairs, in order."""
        assert resolve_grid(["imaging"], [(2, 8)]) == [PRESETS["imaging"], (2, 8)]

    def test_unknown_preset(self):
        """Test that an unknown preset is rejected."""
        with pytest.raises(BenchmarkError):
            resolve_grid(["genomics"])


class TestRun:
    """Tests for timing runs."""

    def test_small_grid(self):
        """Test one record per operation with dense timings."""
        timings = run_benchmark([(2, 8)], repeats=1, seed=3)
        assert [t.op for t in timings] == ["det", "inv", "eig", "mul"]
        assert all(t.dense_seconds is not None for t in timings)
        assert all(t.coordinate_seconds >= 0 for t in timings)

    def test_coordinate_only(self):
        """Test that dense=False skips every dense timing."""
        timings = run_benchmark([(2, 8)], ops=["det"], repeats=1, dense=False)
        assert timings[0].dense_seconds is None
        assert timings[0].speedup is None

    def test_loop_bound_ops_skipped_above_limit(self, monkeypatch):
        """Test that eig and mul skip the dense path above dense_eig_max_dim."""
        monkeypatch.setenv("UBMAT_DENSE_EIG_MAX_DIM", "6")
        get_settings.cache_clear()
        timings = {t.op: t for t in run_benchmark([(2, 8)], repeats=1, seed=3)}
        assert timings["eig"].dense_seconds is None
        assert timings["mul"].dense_seconds is None
        assert timings["det"].dense_seconds is not None

    def test_unknown_operation(self):
        """Test that an unknown operation is rejected."""
        with pytest.raises(BenchmarkError):
            run_benchmark([(2, 8)], ops=["trace"])


class TestTargets:
    """Speed targets of the coordinate path."""

    @pytest.mark.slow
    def test_thousandfold_speedup_at_p_1024(self):
        """Test det and inv at K = 8, p = 1024 against dense LU."""
        timings = run_benchmark([(8, 1024)], ops=["det", "inv"], repeats=5, seed=11)
        for timing in timings:
            assert timing.speedup is not None
            assert timing.speedup >= 1000, f"{timing.op}: {timing.speedup:.0f}x"

    @pytest.mark.slow
    def test_presets_under_a_millisecond(self):
        """Test every coordinate operation on the two study presets."""
        grid = resolve_grid(["proteomics", "imaging"])
        timings = run_benchmark(grid, repeats=25, seed=11, dense=False)
        assert len(timings) == 8
        for timing in timings:
            assert timing.coordinate_seconds < 1e-3, f"{timing.op} K={timing.K} p={timing.p}"


class TestTiming:
    """Tests for BenchTiming."""

    def test_speedup(self):
        """Test dense over coordinate seconds."""
        assert BenchTiming("det", 2, 8, 0.5, 2.0, 1).speedup == 4.0

    def test_speedup_without_dense(self):
        """Test that a skipped dense timing has no speedup."""
        assert BenchTiming("det", 2, 8, 0.5, None, 1).speedup is None


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
