"""Exception types shared across the package."""


class VqthermError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolationError(VqthermError, ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian matrix)."""


class InvalidStateError(VqthermError, ValueError):
    """A matrix claimed to be a density matrix is not one (negative eigenvalue, bad trace)."""


class NumericConsistencyError(VqthermError, ArithmeticError):
    """A quantity that must be real/finite came out otherwise beyond tolerance."""


class DomainError(VqthermError, ValueError):
    """A scalar argument is outside its physical domain (e.g. temperature <= 0)."""


class ConfigError(VqthermError, ValueError):
    """Malformed configuration: inconsistent parameter shapes, bad option values."""


class ObjectiveEvaluationError(VqthermError, RuntimeError):
    """The objective returned a non-finite value during optimization.

    Carries the offending parameter vector and the partial trace collected
    up to the failure.
    """

    def __init__(self, message, params=None, trace=None):
        super().__init__(message)
        self.params = params
        self.trace = trace


class DataError(VqthermError, ValueError):
    """Bad experimental/curve data: parse failure, non-monotone grid, disjoint ranges."""


class FitRangeError(VqthermError, ValueError):
    """The coupling scan did not bracket an interior minimum."""
