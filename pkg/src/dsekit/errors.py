"""Exception hierarchy shared by every dsekit module."""


class DSEError(Exception):
    """Base class for all dsekit errors."""


class IoError(DSEError, OSError):
    """A file is missing or cannot be read."""


class FormatError(DSEError, ValueError):
    """A file is readable but is not a supported npy tensor."""


class DataError(DSEError, ValueError):
    """Values are present but unusable (non-finite, all-zero, ...)."""


class SampleError(DSEError, ValueError):
    pass


class ClusterError(DSEError, ValueError):
    pass


class DimensionError(DSEError, ValueError):
    pass


class ConfigError(DSEError, ValueError):
    pass


class SeriesError(DSEError, ValueError):
    pass


class LengthError(DSEError, ValueError):
    pass


class DSEWarning(UserWarning):
    """Emitted when a computation silently falls back to a degenerate default."""
