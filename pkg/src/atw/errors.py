"""Exception hierarchy for the warping engine.

Every domain failure derives from AtwError so callers (CLI, service) can map
them to exit code 2 / HTTP 422 uniformly.
"""


class AtwError(Exception):
    """Base class for all engine errors."""


class DimensionError(AtwError):
    """Base class for raster-geometry violations."""


class NonDivisibleDimensions(DimensionError):
    """Image dimensions are not divisible by the requested block grid."""


class DimensionMismatch(DimensionError):
    """Two rasters that must share a shape do not."""


class IncompatibleDimensions(DimensionError):
    """Dimensions do not fit the pyramid / decomposition contract."""


class DownscaleNotSupported(DimensionError):
    """upsample() was asked to shrink an axis."""


class MalformedPyramid(DimensionError):
    """Pyramid levels do not chain by exact 2x halvings."""


class AlphaOutOfRange(AtwError):
    """Interpolation factor outside [0, 1]."""


class FileFormatError(AtwError):
    """Base class for file parsing failures."""


class UnsupportedFormat(FileFormatError):
    """File extension or content not among the supported formats."""


class BadMagic(FileFormatError):
    """Binary file does not start with the expected magic bytes."""


class TruncatedFile(FileFormatError):
    """Binary file ends before the declared payload."""


class IoFailure(AtwError):
    """Underlying OS-level read/write failure."""


class BadSpec(AtwError):
    """Mock-field specification string is invalid."""


class TooFewFrames(AtwError):
    """A frame-sequence metric needs at least two frames."""
