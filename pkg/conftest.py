"""
Shared pytest fixtures for the quantum convolution toolkit tests.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from conv_schemes import SCHEMES  # noqa: E402


class CountingInt:
    """Integer that counts every addition and subtraction it takes part in"""
    operations = 0

    def __init__(self, value: int):
        self.value = value

    def __add__(self, other: 'CountingInt') -> 'CountingInt':
        CountingInt.operations += 1
        return CountingInt(self.value + other.value)

    def __sub__(self, other: 'CountingInt') -> 'CountingInt':
        CountingInt.operations += 1
        return CountingInt(self.value - other.value)


@pytest.fixture
def rng():
    """Seeded generator so every random test is reproducible."""
    return np.random.default_rng(20221031)


@pytest.fixture
def counting_int():
    CountingInt.operations = 0
    return CountingInt


@pytest.fixture(params=list(SCHEMES.values()), ids=lambda s: s.slug)
def scheme(request):
    return request.param


@pytest.fixture
def write_pgm(tmp_path):
    """Write raw PGM bytes to a temporary file and return its path."""
    def _write(data: bytes, name: str = 'image.pgm') -> str:
        path = tmp_path / name
        path.write_bytes(data)
        return str(path)
    return _write
