"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`SparsePbnError`. The CLI maps the subclasses to exit codes through
the ``exit_code`` attribute.
"""


class SparsePbnError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParseError(SparsePbnError, ValueError):
    """Malformed matrix or decomposition text."""

    exit_code = 2


class ValidationError(SparsePbnError, ValueError):
    """Well-formed input that is not a valid transition probability matrix."""

    exit_code = 3


class DimensionError(ValidationError):
    """Operands whose sides do not agree, or a side that is not a power of two."""


class InfeasibleSizeError(SparsePbnError):
    """The atom space is too large for the requested computation."""

    exit_code = 4

    def __init__(self, message, size):
        super().__init__(message)
        self.size = size


class VerificationError(SparsePbnError):
    """A decomposition failed exact verification."""

    exit_code = 5


class ContractError(SparsePbnError, ValueError):
    """A function was called outside its documented preconditions."""


class SolverError(SparsePbnError, RuntimeError):
    """An iterative solver hit its iteration cap without converging."""


class OracleTimeout(SparsePbnError, TimeoutError):
    """The exhaustive minimum-length search ran out of its time budget."""
