"""Exception hierarchy shared by all subpackages.

Each error class maps onto one CLI exit code (see pipeline.cli):
configuration errors exit 2, data/format errors exit 3, numerical
failures exit 4.
"""


class SpeechSumError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigurationError(SpeechSumError):
    """Invalid configuration: bad key, bad value, inconsistent settings."""

    exit_code = 2


class DataError(SpeechSumError):
    """Invalid or inconsistent data (empty dataset, count mismatch, ...)."""

    exit_code = 3


class FormatError(SpeechSumError):
    """Malformed file: bad magic, truncated payload, unparseable record."""

    exit_code = 3


class ShapeError(SpeechSumError):
    """Tensor/matrix shape does not match the declared contract."""

    exit_code = 3


class RangeError(SpeechSumError):
    """Index or id outside its valid range."""

    exit_code = 3


class NumericalError(SpeechSumError):
    """A numerical check failed (non-finite values, gradient mismatch)."""

    exit_code = 4
