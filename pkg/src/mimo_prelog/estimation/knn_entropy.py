"""Kozachenko-Leonenko k-nearest-neighbour differential entropy (nats)."""

import math

import numpy as np
from pydantic import BaseModel, Field
from scipy.spatial import cKDTree
from scipy.special import digamma

from ..exceptions import EstimatorError
from ..utils.logger import get_logger
from ..utils.streams import compensated_mean_and_stderr

logger = get_logger(__name__)


class EntropyEstimate(BaseModel):
    """Point estimate with a standard error from the per-sample log-distance terms."""

    value: float
    std_err: float = Field(..., ge=0)
    samples: int
    dim: int
    k: int


def complex_to_real(samples: np.ndarray) -> np.ndarray:
    """(N, m) complex -> (N, 2m) real embedding [Re | Im]."""
    samples = np.asarray(samples)
    return np.concatenate([samples.real, samples.imag], axis=-1)


def knn_entropy(points: np.ndarray, k: int = 4) -> EntropyEstimate:
    """h = psi(N) - psi(k) + d log 2 + (d / N) sum_i log eps_i.

    eps_i is the max-norm distance from point i to its k-th nearest neighbour,
    so 2 eps_i is the side of the enclosing cube.

    Args:
        points: Samples of shape (N, d), or (N,) for scalars
        k: Neighbour order, 1 <= k < N

    Returns:
        Estimate in nats with its standard error

    Raises:
        EstimatorError: If k is out of range or a sample has a zero k-th distance
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n, d = points.shape
    if not 1 <= k < n:
        raise EstimatorError(f"need 1 <= k < N, got k={k}, N={n}", estimator="knn_entropy")

    tree = cKDTree(points)
    distances = tree.query(points, k=k + 1, p=np.inf)[0][:, k]
    if np.any(distances <= 0):
        raise EstimatorError(
            f"{int(np.count_nonzero(distances <= 0))} samples coincide with their "
            f"{k}-th neighbour; the estimator needs continuous data",
            estimator="knn_entropy",
        )

    terms = d * np.log(distances)
    mean, std_err = compensated_mean_and_stderr(terms)
    value = float(digamma(n) - digamma(k)) + d * math.log(2.0) + mean
    logger.debug(f"knn entropy: N={n}, d={d}, k={k}, h={value:.6f} +/- {std_err:.2e}")
    return EntropyEstimate(value=value, std_err=std_err, samples=n, dim=d, k=k)
