"""Shared fixtures for the ubmat test suite."""

from pathlib import Path

import numpy as np
import pytest

from ubmat.core.config import get_settings
from ubmat.repo import write_coordinates
from ubmat.service.ub_matrix import PartitionVector, UBMatrix

EXAMPLES_DIR = Path(__file__).resolve().parents[2] / "data" / "examples"


@pytest.fixture(autouse=True)
def fresh_settings():
    """Drop cached settings so environment overrides never leak between tests."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def worked_instance():
    """p = (2, 3), a = (1, 2), b = [[0.5, 0.2], [0.2, 0.3]]."""
    return UBMatrix([1.0, 2.0], [[0.5, 0.2], [0.2, 0.3]], PartitionVector((2, 3)))


@pytest.fixture
def sigma3():
    """A positive definite covariance on p = (3, 4, 5)."""
    return UBMatrix(
        [1.0, 1.5, 0.8],
        [[0.6, 0.2, 0.1], [0.2, 0.5, 0.15], [0.1, 0.15, 0.4]],
        PartitionVector((3, 4, 5)),
    )


@pytest.fixture
def random_ub():
    """Factory for random symmetric positive definite UB matrices."""
    def make(seed: int, K: int = None, max_size: int = 8) -> UBMatrix:
        gen = np.random.default_rng(seed)
        K = K or int(gen.integers(1, 7))
        sizes = tuple(int(s) for s in gen.integers(2, max_size + 1, K))
        a = gen.uniform(0.5, 2.0, K)
        g = gen.standard_normal((K, K))
        return UBMatrix(a, g @ g.T / K, PartitionVector(sizes))
    return make


@pytest.fixture
def worked_file(tmp_path, worked_instance):
    path = tmp_path / "worked.json"
    write_coordinates(path, worked_instance)
    return path


@pytest.fixture
def sigma3_file(tmp_path, sigma3):
    path = tmp_path / "sigma3.json"
    write_coordinates(path, sigma3)
    return path
