"""Monte Carlo checks: Jacobian log-determinant integrability and pre-log slopes.

Every estimate is a deterministic function of its seed. Work is split into
chunks (or SNR points), each with its own generator spawned from the master
seed, and sums are accumulated with ``math.fsum``.
"""

import math
import time
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..analysis.index_sets import IndexSelection
from ..analysis.jacobian import assemble_batch, build_layout, singular_value_ratio
from ..channel.model import complex_normal, conditional_entropy_batch
from ..channel.types import ColoringMatrix, Dims, Snr
from ..exceptions import EstimatorError
from ..utils.config import get_config
from ..utils.logger import LoggerMixin, get_logger, log_performance
from ..utils.streams import (
    chunk_plan,
    compensated_mean_and_stderr,
    run_chunks,
    spawn_generators,
)
from .knn_entropy import complex_to_real, knn_entropy

logger = get_logger(__name__)

EULER_GAMMA = float(np.euler_gamma)


class McEstimate(BaseModel):
    """Sample mean with standard error; ``floored`` counts numerically singular draws."""

    mean: float
    std_err: float = Field(..., ge=0)
    samples: int
    seed: int
    floored: int = 0
    rho: Optional[float] = None

    @property
    def floored_fraction(self) -> float:
        return self.floored / self.samples if self.samples else 0.0


class SnrGrid(BaseModel):
    """Ascending SNR points; regressions use natural-log SNR as abscissa."""

    model_config = ConfigDict(frozen=True)

    points: List[Snr]

    @field_validator("points")
    @classmethod
    def _increasing(cls, points: List[Snr]) -> List[Snr]:
        if len(points) < 3:
            raise EstimatorError(
                f"an SNR grid needs at least 3 points, got {len(points)}", estimator="SnrGrid"
            )
        rhos = [p.rho for p in points]
        if any(b <= a for a, b in zip(rhos, rhos[1:])):
            raise EstimatorError(
                f"SNR grid must be strictly increasing, got {rhos}", estimator="SnrGrid"
            )
        return points

    @classmethod
    def from_db(cls, start_db: float, stop_db: float, points: int) -> "SnrGrid":
        """``points`` values equally spaced in dB (log-spaced in linear SNR)."""
        return cls(points=[Snr.from_db(float(db)) for db in np.linspace(start_db, stop_db, points)])

    @classmethod
    def default(cls) -> "SnrGrid":
        config = get_config()
        return cls.from_db(config.snr_start_db, config.snr_stop_db, config.snr_points)

    @property
    def rhos(self) -> np.ndarray:
        return np.array([p.rho for p in self.points])

    @property
    def log_rho(self) -> np.ndarray:
        return np.log(self.rhos)

    @property
    def db(self) -> List[float]:
        return [p.db for p in self.points]


class SlopeFit(BaseModel):
    """Least-squares line through per-point estimates against ln(rho)."""

    slope: float
    intercept: float
    slope_std_err: float
    per_point: List[McEstimate]
    quantity: str = Field(..., description="what was regressed")


def _fit(grid: SnrGrid, estimates: List[McEstimate], quantity: str) -> SlopeFit:
    u = grid.log_rho
    values = np.array([e.mean for e in estimates])
    slope, intercept = np.polyfit(u, values, 1)
    weights = (u - u.mean()) / np.sum((u - u.mean()) ** 2)
    errors = np.array([e.std_err for e in estimates])
    slope_err = math.sqrt(math.fsum((weights * errors) ** 2))
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        slope_std_err=slope_err,
        per_point=estimates,
        quantity=quantity,
    )


def ybar_batch(Z: ColoringMatrix, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Noise-free outputs for stacks x (N, T, L), s (N, R, T, Q); shape (N, R, L)."""
    h = np.einsum("rtlq,nrtq->nrtl", Z.blocks, s)
    return np.einsum("nrtl,ntl->nrl", h, x)


def mc_logdet(
    dims: Dims,
    Z: ColoringMatrix,
    sel: IndexSelection,
    samples: int,
    seed: int,
    tol: Optional[float] = None,
    chunk_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> McEstimate:
    """Estimate E[log |det J|^2] over i.i.d. CN(0, 1) inputs x and fading s.

    Each chunk draws x then s from its own stream. Numerically singular draws
    (sigma_min <= tol * sigma_max) contribute log(tol^2) and are counted.

    Args:
        dims: Channel dimensions
        Z: Coloring matrix held fixed over all draws
        sel: Index selection defining J
        samples: Number of draws, at least 2
        seed: Master seed for the per-chunk streams
        tol: Floor threshold, ``nonsingular_tol`` when omitted
        chunk_size: Draws per stream, ``chunk_size`` from the config when omitted
        max_workers: Threads evaluating chunks

    Returns:
        Mean, standard error and the number of floored draws
    """
    if samples < 2:
        raise EstimatorError(f"need at least 2 samples, got {samples}", estimator="mc_logdet")
    config = get_config().with_overrides(chunk_size=chunk_size)
    tol = config.nonsingular_tol if tol is None else tol
    chunk_size = config.chunk_size
    workers = config.max_workers if max_workers is None else max_workers
    layout = build_layout(dims, sel)
    blocks = Z.check(dims).blocks
    floor_value = math.log(tol**2)

    def task(rng: np.random.Generator, size: int) -> Tuple[np.ndarray, int]:
        x = complex_normal(rng, (size, dims.T, dims.L))
        s = complex_normal(rng, (size, dims.R, dims.T, dims.Q))
        matrices = assemble_batch(layout, blocks, x, s)
        sign, logabs = np.linalg.slogdet(matrices)
        singular = (sign == 0) | (np.atleast_1d(singular_value_ratio(matrices)) <= tol)
        values = np.where(singular, floor_value, 2.0 * logabs)
        logger.debug(f"mc_logdet chunk of {size}: {int(singular.sum())} floored")
        return values, int(singular.sum())

    started = time.perf_counter()
    results = run_chunks(seed, chunk_plan(samples, chunk_size), task, max_workers=workers)
    values = np.concatenate([v for v, _ in results])
    floored = sum(c for _, c in results)
    mean, std_err = compensated_mean_and_stderr(values)

    if floored:
        logger.warning(f"mc_logdet for {dims}: {floored} of {samples} draws floored")
    log_performance("mc_logdet", time.perf_counter() - started, dims=str(dims), mean=mean)
    return McEstimate(mean=mean, std_err=std_err, samples=samples, seed=seed, floored=floored)


class MutualInformationEstimator(LoggerMixin):
    """I(x; y) under i.i.d. CN(0, 1) input as h(y) - h(y | x), per channel use.

    h(y) comes from the k-NN estimator on the 2RL-dimensional real embedding of
    y; h(y | x) is the closed-form Gaussian entropy averaged over the same x.
    """

    def __init__(
        self,
        dims: Dims,
        Z: ColoringMatrix,
        knn_k: Optional[int] = None,
        max_rl: Optional[int] = None,
    ):
        config = get_config().with_overrides(knn_k=knn_k, max_rl_for_knn=max_rl)
        self.dims = dims
        self.Z = Z.check(dims)
        self.knn_k = config.knn_k
        self.max_rl = config.max_rl_for_knn
        self.min_samples = config.min_samples_per_k * self.knn_k
        if dims.RL > self.max_rl:
            raise EstimatorError(
                f"RL={dims.RL} exceeds {self.max_rl}; the k-NN entropy estimate "
                f"is unreliable in dimension {2 * dims.RL}",
                estimator="mc_mi_slope",
            )

    def estimate(self, rho: float, samples: int, rng: np.random.Generator, seed: int) -> McEstimate:
        if samples < self.min_samples:
            raise EstimatorError(
                f"{samples} samples is below {self.min_samples} (100 per neighbour, k={self.knn_k})",
                estimator="mc_mi_slope",
            )
        d = self.dims
        x = complex_normal(rng, (samples, d.T, d.L))
        s = complex_normal(rng, (samples, d.R, d.T, d.Q))
        n = complex_normal(rng, (samples, d.R, d.L))
        y = math.sqrt(rho / d.T) * ybar_batch(self.Z, x, s) + n

        joint = knn_entropy(complex_to_real(y.reshape(samples, -1)), k=self.knn_k)
        conditional, cond_err = compensated_mean_and_stderr(
            conditional_entropy_batch(d, rho, self.Z, x)
        )
        mi = (joint.value - conditional) / d.L
        err = math.hypot(joint.std_err, cond_err) / d.L
        self.logger.debug(
            f"rho={rho:.4g}: h(y)={joint.value:.5f}, h(y|x)={conditional:.5f}, I/L={mi:.5f}"
        )
        return McEstimate(mean=mi, std_err=err, samples=samples, seed=seed, rho=rho)


def mc_mi_slope(
    dims: Dims,
    Z: ColoringMatrix,
    grid: SnrGrid,
    samples: int,
    seed: int,
    knn_k: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> SlopeFit:
    """Slope of the per-channel-use mutual information against ln(rho).

    The input is Gaussian, so the slope tracks a lower bound on the pre-log,
    not the pre-log itself.

    Args:
        dims: Channel dimensions; RL may not exceed ``max_rl_for_knn``
        Z: Coloring matrix
        grid: Increasing SNR points
        samples: Draws per SNR point
        seed: Master seed; point i uses the i-th spawned stream
        knn_k: Neighbour rank of the entropy estimator
        max_workers: Threads evaluating SNR points

    Returns:
        Least-squares slope of the estimates against ln(rho)

    Raises:
        EstimatorError: If RL is too large or ``samples`` too small for k
    """
    estimator = MutualInformationEstimator(dims, Z, knn_k=knn_k)
    workers = get_config().max_workers if max_workers is None else max_workers
    rhos = list(grid.rhos)

    def task(rng: np.random.Generator, index: int) -> McEstimate:
        return estimator.estimate(rhos[index], samples, rng, seed)

    started = time.perf_counter()
    per_point = run_chunks(seed, list(range(len(rhos))), task, max_workers=workers)
    fit = _fit(grid, per_point, "mutual information per channel use (nats)")
    logger.info(
        f"mc_mi_slope for {dims}: slope={fit.slope:.4f} +/- {fit.slope_std_err:.4f} "
        f"(Gaussian-input lower-bound slope)"
    )
    log_performance("mc_mi_slope", time.perf_counter() - started, dims=str(dims), samples=samples)
    return fit


def hyx_growth_check(
    dims: Dims,
    Z: ColoringMatrix,
    grid: SnrGrid,
    samples: int,
    seed: int,
    max_workers: Optional[int] = None,
) -> SlopeFit:
    """
    Slope of the average h(y | x) against ln(rho); about TQR for generic Z.

    Args:
        dims: Channel dimensions
        Z: Coloring matrix
        grid: Increasing SNR points
        samples: Inputs x averaged per SNR point
        seed: Master seed; point i uses the i-th spawned stream
        max_workers: Threads evaluating SNR points

    Returns:
        Slope fit with one estimate per SNR point
    """
    if samples < 2:
        raise EstimatorError(
            f"need at least 2 samples, got {samples}", estimator="hyx_growth_check"
        )
    Z.check(dims)
    workers = get_config().max_workers if max_workers is None else max_workers
    rhos = list(grid.rhos)

    def task(rng: np.random.Generator, index: int) -> McEstimate:
        x = complex_normal(rng, (samples, dims.T, dims.L))
        mean, std_err = compensated_mean_and_stderr(
            conditional_entropy_batch(dims, rhos[index], Z, x)
        )
        return McEstimate(mean=mean, std_err=std_err, samples=samples, seed=seed, rho=rhos[index])

    per_point = run_chunks(seed, list(range(len(rhos))), task, max_workers=workers)
    fit = _fit(grid, per_point, "conditional entropy h(y|x) (nats)")
    logger.info(f"hyx_growth_check for {dims}: slope={fit.slope:.4f}, TQR={dims.TQR}")
    return fit


__all__ = [
    "EULER_GAMMA",
    "McEstimate",
    "MutualInformationEstimator",
    "SlopeFit",
    "SnrGrid",
    "hyx_growth_check",
    "mc_logdet",
    "mc_mi_slope",
    "ybar_batch",
]
