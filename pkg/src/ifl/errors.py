"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ValidationError -> 2,
EnumerationSizeError -> 3, FormatError -> 4.
"""


class IflError(Exception):
    """Base class for all package errors."""


class ValidationError(IflError, ValueError):
    """Inputs violate a documented contract (domain, shape, parse)."""


class EnumerationSizeError(IflError):
    """Exhaustive enumeration refused: instance exceeds the size guard."""

    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(
            f"enumeration size {size} exceeds guard limit {limit}"
        )


class FormatError(IflError):
    """A binary input file does not match its documented layout."""
