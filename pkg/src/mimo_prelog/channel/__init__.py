"""Channel model: domain types, input-output map and conditional statistics."""

from .model import (
    apply_channel,
    apply_channel_per_antenna,
    complex_normal,
    conditional_covariance,
    conditional_covariance_batch,
    conditional_entropy_batch,
    conditional_entropy_given_x,
    random_coloring,
    sample_realization,
    xi_matrix,
    ybar,
)
from .types import (
    ChannelInput,
    ColoringMatrix,
    Dims,
    FadingRealization,
    NoiseRealization,
    Snr,
)

__all__ = [
    "ChannelInput",
    "ColoringMatrix",
    "Dims",
    "FadingRealization",
    "NoiseRealization",
    "Snr",
    "apply_channel",
    "apply_channel_per_antenna",
    "complex_normal",
    "conditional_covariance",
    "conditional_covariance_batch",
    "conditional_entropy_batch",
    "conditional_entropy_given_x",
    "random_coloring",
    "sample_realization",
    "xi_matrix",
    "ybar",
]
