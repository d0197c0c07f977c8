"""Exception hierarchy shared across the package.

Everything user-facing (bad files, bad flags, impossible configurations)
derives from PerifitError so the CLI can map it to exit code 1.  Anything
else escaping a command is treated as an internal invariant violation.
"""


class PerifitError(Exception):
    """Base class for errors caused by user input or configuration."""


class ConfigError(PerifitError):
    """A configuration (flags, config file, GA settings) was rejected."""


class DecodeError(PerifitError):
    """A raster could not be decoded into pixel classes."""


class RasterFormatError(PerifitError):
    """A raster or class-map file is malformed or of an unsupported format."""


class PhantomError(PerifitError):
    """A phantom specification cannot be realized."""


class GridSizeError(PerifitError):
    """A brute-force grid exceeds the evaluation budget."""

    def __init__(self, message: str, cardinality: int):
        super().__init__(message)
        self.cardinality = cardinality
