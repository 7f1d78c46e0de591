"""Exception types shared across the package."""


class ChaosCryptError(Exception):
    """Base class for all package errors."""


class ConfigError(ChaosCryptError):
    """Bad map configuration: unknown catalog name, invalid weight, bad file."""


class DimensionError(ChaosCryptError):
    """Array shapes do not satisfy an operation's contract."""


class DataError(ChaosCryptError):
    """Malformed or unsupported input data (files, key material, headers)."""


class UnsupportedFormatError(DataError):
    """Image file format or bit depth outside the supported set."""


class CapacityError(ChaosCryptError):
    """Secret payload does not fit the cover image."""


class StepError(ChaosCryptError):
    """A chaos-map step produced a non-finite value even after guarding."""
