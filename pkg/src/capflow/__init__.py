"""Capillary inverse curvature flow and quermassintegrals in hyperbolic space."""

from .errors import (
    CapflowError,
    ConeViolation,
    ConvexityLoss,
    DomainError,
    FormatError,
    NumericalAbort,
    ParabolicityLoss,
    PoleSingularity,
    ValidationError,
)
from .surface import GraphSurface, HalfSphereGrid, cap_graph, geometry, perturbed_cap

__all__ = [
    "CapflowError",
    "ConeViolation",
    "ConvexityLoss",
    "DomainError",
    "FormatError",
    "NumericalAbort",
    "ParabolicityLoss",
    "PoleSingularity",
    "ValidationError",
    "GraphSurface",
    "HalfSphereGrid",
    "cap_graph",
    "geometry",
    "perturbed_cap",
]

__version__ = "0.1.0"
