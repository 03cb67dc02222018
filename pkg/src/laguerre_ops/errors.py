"""Exception types shared across the package."""


class LaguerreOpsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LaguerreOpsError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole (e.g. Gamma at 0, -1, -2, ...)."""


class NonzeroMeanError(LaguerreOpsError, ValueError):
    """A zero-mean input was required but the input has a nonzero mean."""


class QuadratureError(LaguerreOpsError, RuntimeError):
    """A quadrature did not converge within its refinement budget."""


class OverflowGuardError(LaguerreOpsError, OverflowError):
    """A log-space kernel value left the representable range (|log| > 700)."""


class ConfigError(LaguerreOpsError, ValueError):
    """A scenario or operator configuration violates its constraints."""
