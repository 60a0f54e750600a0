"""
Shared fixtures.
"""

import numpy as np
import pytest

from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte-Carlo or spectrum reproductions")


def random_characteristic(rng: np.random.Generator, K: int, M: int, shifted: bool = False) -> CharacteristicMatrix:
    """Complex Gaussian characteristic matrix (almost surely nonsingular)."""
    entries = rng.standard_normal((K, M)) + 1j * rng.standard_normal((K, M))
    return CharacteristicMatrix(GfdmParams(K, M), entries, shifted)


def random_cmcm(rng: np.random.Generator, K: int, M: int) -> CharacteristicMatrix:
    """Unit-magnitude characteristic matrix with uniform phases."""
    return CharacteristicMatrix(GfdmParams(K, M), np.exp(2j * np.pi * rng.random((K, M))))


def random_symbols(rng: np.random.Generator, size: int) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def make_char(rng):
    def make(K=4, M=3, shifted=False):
        return random_characteristic(rng, K, M, shifted)
    return make


@pytest.fixture
def make_cmcm(rng):
    def make(K=4, M=3):
        return random_cmcm(rng, K, M)
    return make
