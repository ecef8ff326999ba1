"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, IngestError -> 2,
ModelFormatError and IntegrityError -> 3.
"""


class BatchBandError(Exception):
    """Base class for all package errors."""


class ConfigError(BatchBandError):
    """Invalid options or run configuration."""


class IngestError(BatchBandError):
    """Malformed or unusable input data."""


class ModelFormatError(BatchBandError):
    """A model file could not be parsed."""


class VersionError(ModelFormatError):
    """A model file declares an unsupported format version."""


class IntegrityError(BatchBandError):
    """A loaded or constructed model violates an internal invariant."""
