"""
Exception types raised across the toolkit.
"""

from typing import Iterable, List, Tuple


class GfdmError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(GfdmError, ValueError):
    """Raised when an argument has the wrong shape, range or identifier."""


class SingularMatrixError(GfdmError, ValueError):
    """
    Raised when a characteristic matrix has (numerically) zero entries.

    Attributes:
        indices: (k, m) positions of the offending entries
    """

    def __init__(self, message: str, indices: Iterable[Tuple[int, int]] = ()):
        super().__init__(message)
        self.indices: List[Tuple[int, int]] = [tuple(int(i) for i in idx) for idx in indices]


class ChannelNullError(SingularMatrixError):
    """Raised when the channel frequency response has null bins."""

    def __init__(self, message: str, bins: Iterable[int] = ()):
        self.bins: List[int] = [int(b) for b in bins]
        super().__init__(message, indices=[(b,) for b in self.bins])


class LowComplexityUnavailableError(GfdmError):
    """Raised when the exact low-complexity MMSE structure does not exist."""

    def __init__(self, message: str, failing_subsymbols: Iterable[int] = ()):
        super().__init__(message)
        self.failing_subsymbols: List[int] = [int(m) for m in failing_subsymbols]


class RejectionLimitError(GfdmError, RuntimeError):
    """Raised when rejection sampling exceeds its budget."""


class ConfigError(GfdmError, ValueError):
    """Raised for invalid simulation configuration."""
