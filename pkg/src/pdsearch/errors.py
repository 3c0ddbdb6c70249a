"""Exception types raised by pdsearch."""


class PDSearchError(ValueError):
    """Base class for all validation errors raised by this package."""


class SizeError(PDSearchError):
    """Register size outside the supported range."""


class ShapeError(PDSearchError):
    """Mismatched dimensions or qubit counts."""


class DomainError(PDSearchError):
    """Argument outside the mathematical domain of an operation."""
