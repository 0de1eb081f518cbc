"""Exception types shared across the package."""

import numpy as np


class DimensionError(ValueError):
    """Array shapes are empty or do not agree."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class FeasibilityError(DomainError):
    """A guarantee formula is vacuous for the given parameters (e.g. mu >= 1/(2L-1))."""


class NormalizationError(ValueError):
    """A matrix column does not have unit l2 norm."""

    def __init__(self, column, norm):
        super().__init__(f"column {column} has norm {norm!r}, expected 1")
        self.column = column
        self.norm = norm


class SingularityError(np.linalg.LinAlgError):
    """A set of selected columns is numerically rank deficient."""

    def __init__(self, column, message=None):
        super().__init__(message or f"column {column} is linearly dependent on the columns before it")
        self.column = column


class ConfigError(ValueError):
    """Invalid experiment or parameter configuration."""
