"""Exception types raised by conespec."""


class ConespecError(Exception):
    """Base class for all library errors."""


class DomainError(ConespecError, ValueError):
    """An argument lies outside the domain on which a formula is claimed."""


class AssemblyError(ConespecError):
    """Non-finite weight or potential met while assembling a pencil."""


class ConvergenceError(ConespecError):
    """Bisection did not close its bracket within the iteration budget."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class SingularPencilError(ConespecError):
    """A generalized eigenproblem has no finite spectrum to report."""


class ModelError(ConespecError):
    """Malformed model, model file, or an operation unsupported for a model."""
