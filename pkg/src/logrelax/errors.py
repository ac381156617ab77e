"""Exception taxonomy shared across the package.

Validation and domain problems subclass ValueError, numerical failures
subclass RuntimeError, so callers can catch either the package base class
or the usual builtin families.
"""


class LogrelaxError(Exception):
    """Base class for all package errors."""


class DomainError(LogrelaxError, ValueError):
    """Input outside the mathematical domain of an operation."""


class GridError(LogrelaxError, ValueError):
    """Grid descriptor unusable for the requested computation."""


class ValidationError(LogrelaxError, ValueError):
    """Structurally valid input that violates a data contract."""


class ParseError(LogrelaxError, ValueError):
    """Malformed text input; carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class NonConvergentError(LogrelaxError, RuntimeError):
    """An iterative computation hit its budget before meeting its target."""


class QuadratureFailure(LogrelaxError, RuntimeError):
    """Grid refinement did not stabilize the quadrature below tolerance."""
