"""
Quantum Convolution Toolkit - Error Types
=========================================

Exception hierarchy shared by every module of the toolkit. Library code
raises these; only the command-line layer turns them into exit codes.

Version: 1.0
"""

from typing import Optional


class QConvError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidSizeError(QConvError, ValueError):
    """Length is not a power of two, is too small, or sizes disagree."""

    exit_code = 2


class InputParseError(QConvError, ValueError):
    """User supplied numbers or options could not be parsed."""

    exit_code = 2


class ConfigurationError(QConvError, ValueError):
    """A configuration value is missing or out of range."""

    exit_code = 2


class NormalizationError(QConvError, ValueError):
    """A vector of zero norm cannot be turned into a quantum state."""


class UndefinedConditionalError(QConvError, ValueError):
    """Conditioning on an event that has probability zero."""


class GateError(QConvError, ValueError):
    """Gate refers to a qubit outside the register or is malformed."""


class ImageFormatError(QConvError, ValueError):
    """PGM data could not be decoded."""

    exit_code = 3


class TruncatedDataError(ImageFormatError):
    """PGM payload is shorter than the header declares."""


class VerificationError(QConvError, AssertionError):
    """A self-check failed; carries the first failing location."""

    exit_code = 4

    def __init__(self, message: str, scheme: Optional[str] = None,
                 channel: Optional[int] = None, point: Optional[int] = None):
        super().__init__(message)
        self.scheme = scheme
        self.channel = channel
        self.point = point


__all__ = [
    'QConvError',
    'InvalidSizeError',
    'InputParseError',
    'ConfigurationError',
    'NormalizationError',
    'UndefinedConditionalError',
    'GateError',
    'ImageFormatError',
    'TruncatedDataError',
    'VerificationError',
]
