"""Input-output map and conditional Gaussian statistics of one fading block."""

from typing import Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

from ..exceptions import DimensionError
from ..utils.logger import get_logger
from .types import (
    ChannelInput,
    ColoringMatrix,
    Dims,
    FadingRealization,
    NoiseRealization,
    Snr,
)

logger = get_logger(__name__)

LOG_PI_E = float(np.log(np.pi * np.e))


def complex_normal(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """CN(0, 1) entries: independent real/imaginary parts of variance 1/2."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_coloring(dims: Dims, rng: np.random.Generator) -> ColoringMatrix:
    """A generic coloring matrix with i.i.d. CN(0, 1) entries."""
    return ColoringMatrix(blocks=complex_normal(rng, (dims.R, dims.T, dims.L, dims.Q)))


def _check_all(
    dims: Dims,
    Z: ColoringMatrix,
    x: ChannelInput,
    s: Optional[FadingRealization] = None,
    n: Optional[NoiseRealization] = None,
) -> None:
    Z.check(dims)
    x.check(dims)
    if s is not None:
        s.check(dims)
    if n is not None:
        n.check(dims)


def xi_matrix(dims: Dims, Z: ColoringMatrix, x: ChannelInput, t: int) -> np.ndarray:
    """Xi_t = blockdiag(X_t Z_{1,t}, ..., X_t Z_{R,t}), shape RL x RQ (1-based t)."""
    if not 1 <= t <= dims.T:
        raise DimensionError(f"transmit antenna index {t} outside [1:{dims.T}]")
    X_t = x.X(t)
    return block_diag(*(X_t @ Z.block(r, t) for r in range(1, dims.R + 1)))


def ybar(
    dims: Dims, Z: ColoringMatrix, x: ChannelInput, s: FadingRealization
) -> np.ndarray:
    """Noise-free, unscaled output sum_t Xi_t s_t (length RL, r-major)."""
    _check_all(dims, Z, x, s)
    out = np.zeros(dims.RL, dtype=np.complex128)
    for t in range(1, dims.T + 1):
        out += xi_matrix(dims, Z, x, t) @ s.s_t(t)
    return out


def apply_channel(
    dims: Dims,
    snr: Snr,
    Z: ColoringMatrix,
    x: ChannelInput,
    s: FadingRealization,
    n: NoiseRealization,
) -> np.ndarray:
    """y = sqrt(rho / T) * ybar + n in the stacked form."""
    _check_all(dims, Z, x, s, n)
    return np.sqrt(snr.rho / dims.T) * ybar(dims, Z, x, s) + n.vector


def apply_channel_per_antenna(
    dims: Dims,
    snr: Snr,
    Z: ColoringMatrix,
    x: ChannelInput,
    s: FadingRealization,
    n: NoiseRealization,
) -> np.ndarray:
    """y_r = sqrt(rho / T) sum_t diag(h_{r,t}) x_t + n_r for every r, stacked."""
    _check_all(dims, Z, x, s, n)
    h = s.channel(Z)
    scale = np.sqrt(snr.rho / dims.T)
    y = np.empty((dims.R, dims.L), dtype=np.complex128)
    for r in range(dims.R):
        acc = np.zeros(dims.L, dtype=np.complex128)
        for t in range(dims.T):
            acc += np.diag(h[r, t]) @ x.x[t]
        y[r] = scale * acc + n.n[r]
    return y.reshape(-1)


def sample_realization(
    dims: Dims, seed: int
) -> Tuple[ChannelInput, FadingRealization, NoiseRealization]:
    """
    Draw (x, s, n) i.i.d. CN(0, 1) from a private generator seeded by ``seed``.

    Args:
        dims: Channel dimensions
        seed: Seed for a generator that is not shared with other callers

    Returns:
        Input of shape (T, L), fading of shape (R, T, Q) and noise of shape (R, L)
    """
    rng = np.random.default_rng(seed)
    x = ChannelInput(x=complex_normal(rng, (dims.T, dims.L)))
    s = FadingRealization(s=complex_normal(rng, (dims.R, dims.T, dims.Q)))
    n = NoiseRealization(n=complex_normal(rng, (dims.R, dims.L)))
    return x, s, n


def conditional_covariance(
    dims: Dims, snr: Snr, Z: ColoringMatrix, x: ChannelInput
) -> np.ndarray:
    """Covariance of y given x: I_RL + (rho / T) sum_t Xi_t Xi_t^H."""
    _check_all(dims, Z, x)
    cov = np.eye(dims.RL, dtype=np.complex128)
    for t in range(1, dims.T + 1):
        xi = xi_matrix(dims, Z, x, t)
        cov += (snr.rho / dims.T) * (xi @ xi.conj().T)
    # exact Hermitian symmetry despite roundoff
    return 0.5 * (cov + cov.conj().T)


def conditional_covariance_batch(
    dims: Dims, rho: float, Z: ColoringMatrix, x: np.ndarray
) -> np.ndarray:
    """Vectorized conditional covariances for a stack of inputs x of shape (..., T, L).

    Entry (r l, r' l') is delta + (rho/T) sum_t x_t[l] conj(x_t[l']) <Z_{r,t}[l], Z_{r',t}[l']>
    restricted to r = r' (the blocks of Xi_t are diagonal over receive antennas).
    """
    Zb = Z.check(dims).blocks
    gram = np.einsum("rtlq,rtmq->rtlm", Zb, Zb.conj())
    per_r = np.einsum("...tl,...tm,rtlm->...rlm", x, x.conj(), gram)
    batch = x.shape[:-2]
    cov = np.zeros(batch + (dims.RL, dims.RL), dtype=np.complex128)
    for r in range(dims.R):
        sl = slice(r * dims.L, (r + 1) * dims.L)
        cov[..., sl, sl] = (rho / dims.T) * per_r[..., r, :, :]
    cov += np.eye(dims.RL)
    return cov


def conditional_entropy_given_x(
    dims: Dims, snr: Snr, Z: ColoringMatrix, x: ChannelInput
) -> float:
    """
    h(y | x = x) = log det(pi e Sigma(x)) in nats.

    Args:
        dims: Channel dimensions
        snr: Signal-to-noise ratio
        Z: Coloring matrix
        x: Fixed channel input

    Returns:
        Differential entropy of the Gaussian output given ``x``
    """
    cov = conditional_covariance(dims, snr, Z, x)
    sign, logdet = np.linalg.slogdet(cov)
    logger.debug(f"conditional entropy at rho={snr.rho:g}: logdet={logdet:.6f}")
    return dims.RL * LOG_PI_E + float(logdet)


def conditional_entropy_batch(
    dims: Dims, rho: float, Z: ColoringMatrix, x: np.ndarray
) -> np.ndarray:
    """h(y | x) for a stack of inputs of shape (..., T, L); nats."""
    _, logdet = np.linalg.slogdet(conditional_covariance_batch(dims, rho, Z, x))
    return dims.RL * LOG_PI_E + logdet
