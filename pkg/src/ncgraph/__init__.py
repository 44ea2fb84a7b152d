"""Simulation and limit theory of the N-interactions preferential-attachment graph."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    DerivedConstants, DomainError, ModelParams, ValidationTier, derive_constants, validate,
)

__all__ = [
    "DerivedConstants", "DomainError", "ModelParams", "ValidationTier",
    "derive_constants", "validate", "__version__",
]
