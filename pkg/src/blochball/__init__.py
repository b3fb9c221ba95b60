"""Geometry of the complex Hilbert ball, Bloch-function calculus, and
composition-operator compactness diagnostics at a finite truncation
dimension."""

from .ball import (
    MetricValue,
    MobiusAutomorphism,
    Point,
    hyperbolic,
    inner,
    mobius_apply,
    mobius_derivative,
    norm,
    pseudo_hyperbolic,
)
from .errors import DomainError, EvaluationError, SpecValidationError
from .holo import (
    AnalyticFunction,
    QuadratureConfig,
    directional_derivative,
    gradient,
    invariant_gradient,
    invariant_gradient_norm,
    radial_boundary_integral,
    radial_derivative,
)
from .kernels import active_backend
from .sampling import SearchBudget

__version__ = "0.1.0"

__all__ = [
    "AnalyticFunction",
    "DomainError",
    "EvaluationError",
    "MetricValue",
    "MobiusAutomorphism",
    "Point",
    "QuadratureConfig",
    "SearchBudget",
    "SpecValidationError",
    "active_backend",
    "directional_derivative",
    "gradient",
    "hyperbolic",
    "inner",
    "invariant_gradient",
    "invariant_gradient_norm",
    "mobius_apply",
    "mobius_derivative",
    "norm",
    "pseudo_hyperbolic",
    "radial_boundary_integral",
    "radial_derivative",
]
