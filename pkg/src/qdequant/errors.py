"""Exception types shared across the package."""


class QDequantError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QDequantError, ValueError):
    """Operands disagree on n, m or the Hilbert-space dimension."""


class CostGuardError(QDequantError, ValueError):
    """A request would exceed an explicit size guard."""


class DomainError(QDequantError, ValueError):
    """A parameter lies outside the domain of a formula."""


class ValidationError(QDequantError, ValueError):
    """An algorithm failed unitarity / CSOP / normalization checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FormatError(QDequantError, ValueError):
    """A JSON document does not match the expected schema."""
