"""Tests for the k-nearest-neighbour entropy estimator."""

import math

import numpy as np
import pytest

from mimo_prelog.estimation.knn_entropy import complex_to_real, knn_entropy
from mimo_prelog.exceptions import EstimatorError


def gaussian_entropy(d: int) -> float:
    return 0.5 * d * math.log(2 * math.pi * math.e)


class TestKnnEntropy:
    @pytest.mark.parametrize("d, tol", [(1, 0.05), (2, 0.05), (4, 0.1)])
    def test_standard_gaussian(self, d, tol):
        points = np.random.default_rng(d).standard_normal((20_000, d))
        estimate = knn_entropy(points, k=4)
        assert estimate.value == pytest.approx(gaussian_entropy(d), abs=tol)
        assert estimate.dim == d
        assert estimate.samples == 20_000

    def test_scaling_shifts_by_log_factor(self):
        points = np.random.default_rng(1).standard_normal((10_000, 2))
        base = knn_entropy(points).value
        scaled = knn_entropy(3.0 * points).value
        assert scaled - base == pytest.approx(2 * math.log(3.0), abs=1e-9)

    def test_uniform_square(self):
        points = np.random.default_rng(2).uniform(size=(20_000, 2))
        assert knn_entropy(points).value == pytest.approx(0.0, abs=0.05)

    def test_one_dimensional_input(self):
        points = np.random.default_rng(3).standard_normal(5000)
        assert knn_entropy(points, k=3).dim == 1

    def test_duplicates_are_rejected(self):
        points = np.repeat(np.random.default_rng(4).standard_normal((50, 2)), 6, axis=0)
        with pytest.raises(EstimatorError):
            knn_entropy(points, k=4)

    @pytest.mark.parametrize("k", [0, 10])
    def test_bad_neighbour_count(self, k):
        with pytest.raises(EstimatorError):
            knn_entropy(np.random.default_rng(5).standard_normal((10, 2)), k=k)


def test_complex_embedding():
    samples = np.array([[1 + 2j, 3 - 4j]])
    np.testing.assert_array_equal(complex_to_real(samples), [[1, 3, 2, -4]])
