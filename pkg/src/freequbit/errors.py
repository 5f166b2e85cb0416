"""Exception types shared across the package."""


class FreeQubitError(Exception):
    """Base class for all package errors."""


class ValidationError(FreeQubitError, ValueError):
    """Invalid parameters or configuration."""


class TruncationError(FreeQubitError):
    """A ladder window is too small for the requested operation."""


class AccuracyError(FreeQubitError, ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class ConvergenceError(FreeQubitError, ArithmeticError):
    """An iterative solver did not converge."""


class AmbiguousPeaksError(FreeQubitError):
    """Spectrum peak structure does not identify a unique gain/loss pair."""


class IndeterminateStateError(FreeQubitError):
    """Measured signal is below the noise floor; the state cannot be resolved."""
