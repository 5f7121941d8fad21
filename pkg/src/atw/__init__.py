"""High-resolution animation by residual warping.

Decomposes an HD still into a low-resolution component plus high-frequency
residuals, warps the residuals with a motion field, and recomposes sharp
frames (vanilla single-residual or multiscale pyramid recomposition).
"""

__version__ = "0.1.0"

from .errors import (
    AlphaOutOfRange,
    AtwError,
    BadMagic,
    BadSpec,
    DimensionMismatch,
    DownscaleNotSupported,
    IncompatibleDimensions,
    IoFailure,
    MalformedPyramid,
    NonDivisibleDimensions,
    TooFewFrames,
    TruncatedFile,
    UnsupportedFormat,
)
from .image import ImageBuffer, ResidualMap
from .resample import ResamplingMethod, downsample_average, upsample
from .pyramid import (
    ResidualPyramid,
    build_laplacian_pyramid,
    reconstruct_pyramid,
    residual,
)
from .formats import (
    load_image,
    load_raster,
    read_pyramid_dir,
    save_image,
    save_raster,
    write_pyramid_dir,
)
from .motion import (
    MotionField,
    NormalizedField,
    interpolate_field,
    load_field,
    read_field_file,
    save_field,
    save_normalized_field,
    scale_field,
    upsample_field,
    warp,
)
from .mock import MockFieldSpec, generate_mock_field, parse_mock_spec
from .reswarp import (
    Decomposition,
    ReswarpConfig,
    ReswarpMode,
    ReswarpResult,
    decompose,
    multiscale_reswarp,
    vanilla_reswarp,
)
from .jobs import metric_coherency

__all__ = [name for name in dir() if not name.startswith("_")]
