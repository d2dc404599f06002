"""Package exception types.

Contract violations raise ``ValueError`` subclasses where natural;
file-format problems raise :class:`FormatError` so the CLI can map them
to a distinct exit code.
"""


class HmdecodeError(Exception):
    """Base class for package-specific errors."""


class FormatError(HmdecodeError):
    """Malformed input file (container, plan, or truth document)."""


class ConfigError(HmdecodeError, ValueError):
    """Invalid experiment or decoder configuration."""


class CalibrationError(HmdecodeError, ValueError):
    """Calibration could not select a trim (all candidates flagged)."""
