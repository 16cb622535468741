"""Numerical checks of Poincare-type inequalities for Gaussian, Cauchy and sphere measures."""

from .errors import (
    ConfigurationError,
    DivergentMeasureError,
    DomainError,
    InfiniteMomentError,
    PoisonedSampleError,
    ShapeError,
    TruncationError,
    VarianceGuardError,
)
from .measures import CauchyParams, GaussianMeasure, PointBatch, RngStream
from .montecarlo import MCEstimate, mc_estimate, mc_estimate_many

__version__ = "0.1.0"

__all__ = [
    "CauchyParams",
    "ConfigurationError",
    "DivergentMeasureError",
    "DomainError",
    "GaussianMeasure",
    "InfiniteMomentError",
    "MCEstimate",
    "PointBatch",
    "PoisonedSampleError",
    "RngStream",
    "ShapeError",
    "TruncationError",
    "VarianceGuardError",
    "mc_estimate",
    "mc_estimate_many",
]
