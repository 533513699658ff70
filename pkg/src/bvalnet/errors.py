"""Exception types shared across the package."""


class BValNetError(Exception):
    """Base class for all package errors."""


class CatalogParseError(BValNetError, ValueError):
    """A catalog line could not be parsed."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ValidationError(BValNetError, ValueError):
    """A value violates a documented invariant."""


class InsufficientDataError(BValNetError, ValueError):
    """Not enough events or vectors to perform the requested computation."""


class DegenerateWindowError(BValNetError, ValueError):
    """A magnitude window has no spread above the cutoff, so b is undefined."""


class ModelFormatError(BValNetError, ValueError):
    """A model file is malformed or does not match the expected dimensions."""
