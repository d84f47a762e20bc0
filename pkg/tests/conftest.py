"""Shared fixtures for the pre-log toolkit tests."""

from typing import List

import numpy as np
import pytest
from loguru import logger

from mimo_prelog.analysis.index_sets import sweep_grid
from mimo_prelog.channel import ColoringMatrix, Dims, random_coloring


@pytest.fixture
def siso() -> Dims:
    return Dims(T=1, R=1, L=2, Q=1)


@pytest.fixture
def worked_example() -> Dims:
    return Dims(T=3, R=3, L=6, Q=1)


@pytest.fixture
def unit_siso_Z() -> ColoringMatrix:
    """Z = (1, 1)^T for (T=1, R=1, L=2, Q=1)."""
    return ColoringMatrix(blocks=np.ones((1, 1, 2, 1)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_Z(rng):
    def make(dims: Dims) -> ColoringMatrix:
        return random_coloring(dims, rng)

    return make


@pytest.fixture(scope="session")
def grid() -> List[Dims]:
    return list(sweep_grid())


@pytest.fixture
def captured_warnings():
    """Collect loguru WARNING-and-above records emitted during the test."""
    records: List[str] = []
    handler_id = logger.add(lambda message: records.append(str(message)), level="WARNING")
    yield records
    logger.remove(handler_id)
