"""Monte Carlo estimators and the k-NN entropy estimator they rely on."""

from .knn_entropy import EntropyEstimate, complex_to_real, knn_entropy
from .montecarlo import (
    EULER_GAMMA,
    McEstimate,
    MutualInformationEstimator,
    SlopeFit,
    SnrGrid,
    hyx_growth_check,
    mc_logdet,
    mc_mi_slope,
    ybar_batch,
)

__all__ = [
    "EULER_GAMMA",
    "EntropyEstimate",
    "McEstimate",
    "MutualInformationEstimator",
    "SlopeFit",
    "SnrGrid",
    "complex_to_real",
    "hyx_growth_check",
    "knn_entropy",
    "mc_logdet",
    "mc_mi_slope",
    "ybar_batch",
]
