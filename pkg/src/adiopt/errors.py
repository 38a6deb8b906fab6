"""Exception types raised by the adiopt package."""


class AdioptError(Exception):
    """Base class for all package-specific errors."""


class NotHermitianError(AdioptError):
    """Input matrix fails the Hermitian symmetry check."""


class NotPositiveError(AdioptError):
    """Matrix has an eigenvalue below the allowed negative tolerance."""


class DimensionMismatchError(AdioptError):
    """Operator or state dimensions are incompatible."""


class NegativeRateError(AdioptError):
    """Decay rate must be non-negative."""


class InvariantViolationError(AdioptError):
    """A runtime invariant (trace, Hermiticity, positivity) was violated."""


class BadLabelError(AdioptError):
    """Basis-state label does not parse for the given qubit count."""


class NonFiniteUpdateError(AdioptError):
    """Control update produced NaN or Inf."""


class ConfigError(AdioptError):
    """Scenario configuration is invalid or unparseable."""
