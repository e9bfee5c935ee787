"""
Exception hierarchy for the concavity bounds toolkit.
"""


class ConcavityBoundsError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(ConcavityBoundsError, ValueError):
    """An input lies outside the domain of the requested operation."""


class InvalidBloch(DomainError):
    """A Bloch vector lies outside the closed unit ball."""


class NotPositiveSemidefinite(DomainError):
    """A matrix that must be positive semidefinite has a negative eigenvalue."""


class InvalidDensityMatrix(DomainError):
    """A matrix fails the density matrix invariants."""


class DimensionError(DomainError):
    """Operands have incompatible or unsupported dimensions."""


class IndeterminateAtHalf(DomainError):
    """The Kim bound was requested too close to x = 1/2."""


class DegenerateProblem(DomainError):
    """The two states of a mixture problem are indistinguishable."""


class StateFileError(ConcavityBoundsError, ValueError):
    """A state file could not be read or does not follow the state format."""


class ConvergenceError(ConcavityBoundsError, RuntimeError):
    """The eigensolver did not converge within its sweep budget."""


class RouteMismatchError(ConcavityBoundsError, RuntimeError):
    """Two evaluation routes of the same quantity disagree."""
