"""Exception types shared across the package."""


class InvseriesError(Exception):
    """Base class for every error raised by this library."""


class MalformedDecimalError(InvseriesError, ValueError):
    """A decimal literal could not be parsed."""


class ShapeMismatchError(InvseriesError, ValueError):
    """Operands have incompatible dimensions or truncation degrees."""


class SingularMatrixError(InvseriesError):
    """A pivot fell below the singularity threshold during elimination."""


class DivisionByZeroJetError(InvseriesError, ZeroDivisionError):
    """Reciprocal of a jet whose constant term is numerically zero."""


class DomainError(InvseriesError, ValueError):
    """An elementary function was evaluated outside its real domain."""


class ParseError(InvseriesError, ValueError):
    """Problem text could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownVariableError(ParseError):
    """An expression referenced a name that was never declared."""


class NonSquareSystemError(ParseError):
    """Equation count does not match the declared variable count."""


class SchemeSizeError(InvseriesError, ValueError):
    """Requested order or variable count exceeds the supported range."""


class InsufficientDataError(InvseriesError):
    """A trace does not contain enough usable iterations for an estimate."""


class IterationError(InvseriesError):
    """Evaluation failed while building an update; carries the iterate index."""

    def __init__(self, iteration, message):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {message}")
