"""Exception types shared across the package.

The CLI maps these onto process exit codes, so raising the right type
matters more than the message wording.
"""


class EdgeOffloadError(Exception):
    """Base class for all package errors."""


class ConfigError(EdgeOffloadError):
    """Invalid, unknown, or out-of-range configuration input."""


class ProtocolError(EdgeOffloadError):
    """An operation was called outside its contract (bad action index, etc.)."""


class ShapeError(EdgeOffloadError):
    """Array operands with incompatible shapes."""


class NumericalError(EdgeOffloadError):
    """Non-finite values, diverging losses, or failed gradient checks."""


class CheckpointError(EdgeOffloadError):
    """Malformed or inconsistent checkpoint data."""
