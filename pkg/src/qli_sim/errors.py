"""Exception hierarchy. The CLI prints the class name as the error class."""


class QLIError(Exception):
    """Base class for all errors raised by qli_sim."""


class DomainError(QLIError, ValueError):
    """An argument is outside the domain of the formula."""


class PreconditionError(QLIError, ValueError):
    """An input state or object does not satisfy an operation's precondition."""


class TruncationError(QLIError, RuntimeError):
    """Fock-space truncation is too small for the requested evolution."""

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class ConvergenceError(QLIError, RuntimeError):
    """Step-halving did not converge within the step budget."""


class UnidentifiablePhaseError(QLIError, ValueError):
    """Shot record is degenerate (all bright or all dark)."""


class InsufficientDataError(QLIError, ValueError):
    """Time series too short for the requested analysis."""


class InfeasibleError(QLIError, ValueError):
    """No finite integration time reaches the SNR target."""


class InputError(QLIError, ValueError):
    """Mismatched or malformed input arrays."""


class SweepCapError(QLIError, ValueError):
    """Requested sweep exceeds the configured point cap."""

    def __init__(self, count, cap):
        super().__init__(f"sweep requests {count} points, cap is {cap}")
        self.count = count
        self.cap = cap


class ScenarioError(QLIError, ValueError):
    """Scenario file could not be parsed or validated."""
