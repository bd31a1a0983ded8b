"""Exception types shared across the package."""


class LangEqError(Exception):
    """Base class for all package errors."""


class FormatError(LangEqError, ValueError):
    """Malformed input text (BLIF-lite, AUT) or invalid names."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(LangEqError, ValueError):
    """An operation was called outside its precondition."""


class ResourceLimitError(LangEqError, RuntimeError):
    """A node limit, subset limit or deadline was exceeded."""


class SolverTimeout(ResourceLimitError):
    """The wall-clock budget of a computation ran out."""
