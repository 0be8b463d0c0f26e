"""Exception hierarchy shared by the pipeline stages.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
ProtocolError -> 3.
"""

from __future__ import annotations


class NoisyOffenseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(NoisyOffenseError):
    """Invalid configuration value or inconsistent option combination."""


class DataError(NoisyOffenseError):
    """Malformed or inconsistent input data.

    Carries the offending file path and 1-based line number when known,
    so ingestion failures point at the exact row.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None and line is not None:
            prefix = f"{path}:{line}: "
        elif path is not None:
            prefix = f"{path}: "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)


class ModelFormatError(DataError):
    """Model file is corrupt or carries an unsupported format version."""


class ProtocolError(NoisyOffenseError):
    """External classifier adapter violated the wire protocol."""


class SweepError(NoisyOffenseError):
    """A threshold-sweep candidate failed during training or evaluation."""
