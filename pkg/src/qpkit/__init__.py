"""Quasi-periodic functions, their periodic parents, and torus dynamics."""

from .number_field import FieldScalar, FrequencyMatrix, golden_conjugate, golden_ratio, sqrt

__version__ = "0.1.0"

__all__ = [
    "FieldScalar",
    "FrequencyMatrix",
    "golden_ratio",
    "golden_conjugate",
    "sqrt",
]
