"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DistOrderError(Exception):
    """Base class for all library errors."""


class DomainError(DistOrderError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(DomainError):
    """A sampled function does not satisfy the operator's domain condition."""


class ConfigurationError(DistOrderError, ValueError):
    """Invalid quadrature, contour or run configuration."""


class NumericalError(DistOrderError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class ContourError(NumericalError):
    """Contour quadrature could not be made safe or convergent."""


class StepSizeError(NumericalError):
    """An implicit time step is (nearly) singular; refine the grid."""
