"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: I/O problems exit 1 (plain OSError),
format/validation problems exit 2, external-scorer protocol problems exit 3.
"""


class AldiError(Exception):
    """Base class for all toolkit errors."""


class FormatError(AldiError):
    """Malformed input file, config, or value (CLI exit code 2)."""


class ProtocolError(AldiError):
    """External scorer violated the line protocol (CLI exit code 3)."""
