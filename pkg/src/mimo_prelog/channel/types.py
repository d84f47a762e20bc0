"""Domain types for the temporally correlated block-fading MIMO channel.

Array layouts (1-based indices in the maths, 0-based in numpy):

* coloring blocks ``Z[r, t]`` -> array of shape ``(R, T, L, Q)``
* input ``x[t, l]`` -> ``(T, L)``; stacked ``x`` is t-major then l
* fading ``s[r, t, q]`` -> ``(R, T, Q)``; stacked ``s`` is t-major, then r, then q
* noise / output ``n[r, l]`` -> ``(R, L)``; stacked vectors are r-major then l
"""

from typing import Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import DimensionError, InvalidDimsError
from ..utils.config import get_config


class Dims(BaseModel):
    """The quadruple (T, R, L, Q) governing every shape."""

    model_config = ConfigDict(frozen=True)

    T: int = Field(..., ge=1, description="Transmit antennas")
    R: int = Field(..., ge=1, description="Receive antennas")
    L: int = Field(..., ge=1, description="Block length in symbols")
    Q: int = Field(..., ge=1, description="Rank of each temporal correlation matrix")

    @model_validator(mode="after")
    def _rank_fits_block(self) -> "Dims":
        if self.Q > self.L:
            raise ValueError(f"Q={self.Q} must not exceed L={self.L}")
        return self

    @property
    def TQ(self) -> int:
        return self.T * self.Q

    @property
    def TQR(self) -> int:
        return self.T * self.Q * self.R

    @property
    def RL(self) -> int:
        return self.R * self.L

    @property
    def TL(self) -> int:
        return self.T * self.L

    @property
    def jacobian_size(self) -> int:
        """min{TL - T + TQR, RL}: rows (and columns) of the square Jacobian."""
        return min(self.TL - self.T + self.TQR, self.RL)

    def with_R(self, R: int) -> "Dims":
        """Same configuration with a different receive-antenna count."""
        return Dims(T=self.T, R=R, L=self.L, Q=self.Q)

    def require_construction_domain(self) -> "Dims":
        """Reject dims outside T <= R, L > TQ (where the index sets exist)."""
        if self.T > self.R:
            raise InvalidDimsError(
                f"construction requires T <= R, got T={self.T}, R={self.R}",
                dims=self,
                validation_rule="T <= R",
            )
        if self.L <= self.TQ:
            raise InvalidDimsError(
                f"construction requires L > TQ, got L={self.L}, TQ={self.TQ}",
                dims=self,
                validation_rule="L > TQ",
            )
        return self

    def as_dict(self) -> dict:
        return {"T": self.T, "R": self.R, "L": self.L, "Q": self.Q}

    def __str__(self) -> str:
        return f"(T={self.T}, R={self.R}, L={self.L}, Q={self.Q})"


class Snr(BaseModel):
    """Linear signal-to-noise ratio."""

    model_config = ConfigDict(frozen=True)

    rho: float = Field(..., gt=0, description="Linear SNR")

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(rho=10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * float(np.log10(self.rho))


def _as_complex(value: Any, ndim: int, name: str) -> np.ndarray:
    array = np.asarray(value, dtype=np.complex128)
    if array.ndim != ndim:
        raise DimensionError(
            f"{name} must be a {ndim}-d array, got shape {array.shape}",
            actual_shape=array.shape,
        )
    if not np.all(np.isfinite(array)):
        raise DimensionError(f"{name} has non-finite entries", actual_shape=array.shape)
    return array


def _check_shape(array: np.ndarray, expected: Tuple[int, ...], name: str) -> None:
    if array.shape != expected:
        raise DimensionError(
            f"{name} has shape {array.shape}, expected {expected}",
            expected_shape=expected,
            actual_shape=array.shape,
        )


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ColoringMatrix(_ArrayModel):
    """The R x T grid of L x Q coloring blocks Z_{r,t}."""

    blocks: np.ndarray

    @field_validator("blocks", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _as_complex(value, 4, "coloring blocks")

    @model_validator(mode="after")
    def _full_rank_blocks(self) -> "ColoringMatrix":
        _, _, L, Q = self.blocks.shape
        if Q > L:
            raise DimensionError("coloring blocks must have Q <= L", actual_shape=self.blocks.shape)
        smallest = np.linalg.svd(self.blocks, compute_uv=False)[..., -1]
        tol = get_config().rank_tol
        if np.any(smallest <= tol):
            r, t = np.argwhere(smallest <= tol)[0]
            raise InvalidDimsError(
                f"coloring block Z[{r + 1},{t + 1}] is rank deficient "
                f"(smallest singular value {smallest[r, t]:.3e} <= {tol:g})",
                validation_rule="rank(Z_rt) = Q",
            )
        return self

    def check(self, dims: Dims) -> "ColoringMatrix":
        _check_shape(self.blocks, (dims.R, dims.T, dims.L, dims.Q), "coloring matrix")
        return self

    def block(self, r: int, t: int) -> np.ndarray:
        """Z_{r,t} with 1-based antenna indices."""
        return self.blocks[r - 1, t - 1]

    def stacked(self) -> np.ndarray:
        """The RL x TQ coloring matrix Z."""
        R, T, L, Q = self.blocks.shape
        return self.blocks.transpose(0, 2, 1, 3).reshape(R * L, T * Q)

    def scaled(self, factor: complex) -> "ColoringMatrix":
        return ColoringMatrix(blocks=self.blocks * factor)


class ChannelInput(_ArrayModel):
    """Transmitted block: x_t for every transmit antenna."""

    x: np.ndarray

    @field_validator("x", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _as_complex(value, 2, "channel input")

    def check(self, dims: Dims) -> "ChannelInput":
        _check_shape(self.x, (dims.T, dims.L), "channel input")
        return self

    @property
    def vector(self) -> np.ndarray:
        """Stacked x of length TL (t-major)."""
        return self.x.reshape(-1)

    def X(self, t: int) -> np.ndarray:
        """X_t = diag(x_t), 1-based t."""
        return np.diag(self.x[t - 1])


class FadingRealization(_ArrayModel):
    """Whitened fading vectors s_{r,t}, h_{r,t} = Z_{r,t} s_{r,t}."""

    s: np.ndarray

    @field_validator("s", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _as_complex(value, 3, "fading realization")

    def check(self, dims: Dims) -> "FadingRealization":
        _check_shape(self.s, (dims.R, dims.T, dims.Q), "fading realization")
        return self

    def s_t(self, t: int) -> np.ndarray:
        """s_t = (s_{1,t}, ..., s_{R,t}) of length RQ, 1-based t."""
        return self.s[:, t - 1, :].reshape(-1)

    @property
    def vector(self) -> np.ndarray:
        """Stacked s of length TRQ (t-major, then r, then q)."""
        return self.s.transpose(1, 0, 2).reshape(-1)

    def channel(self, Z: ColoringMatrix) -> np.ndarray:
        """h[r, t] = Z_{r,t} s_{r,t}, shape (R, T, L)."""
        return np.einsum("rtlq,rtq->rtl", Z.blocks, self.s)

    def scaled(self, factor: complex) -> "FadingRealization":
        return FadingRealization(s=self.s * factor)


class NoiseRealization(_ArrayModel):
    """Receiver noise n_r for every receive antenna."""

    n: np.ndarray

    @field_validator("n", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _as_complex(value, 2, "noise realization")

    def check(self, dims: Dims) -> "NoiseRealization":
        _check_shape(self.n, (dims.R, dims.L), "noise realization")
        return self

    @property
    def vector(self) -> np.ndarray:
        return self.n.reshape(-1)
