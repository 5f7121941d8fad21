"""ResWarp recomposition: decompose, warp residuals, reassemble at full size.

Vanilla mode keeps one full-resolution residual map; multiscale mode keeps a
Laplacian pyramid and recomposes coarse-to-fine, warping every level with the
same base-resolution field up-sampled to that level's size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, IncompatibleDimensions, NonDivisibleDimensions
from .image import ImageBuffer, ResidualMap
from . import kernels
from .motion import MotionField
from .pyramid import ResidualPyramid, build_laplacian_pyramid, residual
from .resample import ResamplingMethod, downsample_average, upsample

__all__ = [
    "ReswarpMode",
    "ReswarpConfig",
    "Decomposition",
    "ReswarpResult",
    "decompose",
    "vanilla_reswarp",
    "multiscale_reswarp",
]


class ReswarpMode(str, Enum):
    VANILLA = "vanilla"
    MULTISCALE = "multiscale"


@dataclass(frozen=True)
class ReswarpConfig:
    mode: ReswarpMode = ReswarpMode.VANILLA
    base_size: int = 128
    upsample_method: ResamplingMethod = ResamplingMethod.BILINEAR

    def __post_init__(self):
        object.__setattr__(self, "mode", ReswarpMode(self.mode))
        object.__setattr__(self, "upsample_method", ResamplingMethod(self.upsample_method))
        b = self.base_size
        # valid sizes: 16 * 2^k
        if b < 16 or b % 16 or (b // 16) & (b // 16 - 1):
            raise ValueError(f"base_size must be 16 * 2^k, got {b}")


@dataclass(frozen=True)
class Decomposition:
    """Low-resolution component plus residuals in one of the two layouts."""

    mode: ReswarpMode
    low: ImageBuffer
    residual: ResidualMap | None = None
    pyramid: ResidualPyramid | None = None

    def __post_init__(self):
        if self.mode == ReswarpMode.VANILLA and self.residual is None:
            raise ValueError("vanilla decomposition needs a residual map")
        if self.mode == ReswarpMode.MULTISCALE and self.pyramid is None:
            raise ValueError("multiscale decomposition needs a pyramid")

    @property
    def full_size(self) -> tuple[int, int]:
        if self.mode == ReswarpMode.VANILLA:
            return self.residual.size
        return self.pyramid.full_size


@dataclass(frozen=True)
class ReswarpResult:
    image: ImageBuffer
    clamped: int  # samples that fell outside [-1, 1] before clamping


def decompose(raw: ImageBuffer, cfg: ReswarpConfig) -> Decomposition:
    """Split an image into its base-size low component and residuals."""
    base = cfg.base_size
    if cfg.mode == ReswarpMode.VANILLA:
        if raw.width % base or raw.height % base:
            raise NonDivisibleDimensions(
                f"{raw.width}x{raw.height} is not a multiple of base_size {base}"
            )
        low = downsample_average(raw, base, base)
        approx = upsample(low, raw.width, raw.height, cfg.upsample_method)
        return Decomposition(cfg.mode, low=low, residual=residual(raw, approx))
    pyr = build_laplacian_pyramid(raw, base, cfg.upsample_method)
    return Decomposition(cfg.mode, low=pyr.base, pyramid=pyr)


def _finish(data: np.ndarray) -> ReswarpResult:
    clamped = int(kernels.clamp_count(data))
    return ReswarpResult(ImageBuffer(data), clamped)


def _add_warped(accum: np.ndarray, raster: ImageBuffer, f: MotionField) -> None:
    """accum += warp(raster, upsample_field(f, raster size)), in one pass.

    The fused kernel rounds exactly like the unfused composition, so results
    match it bit for bit; fusing avoids materializing the full-size field and
    warped raster (hundreds of MB at 4K).
    """
    w, h = raster.size
    x0, x1, fx = kernels.linear_taps(f.width, w)
    y0, y1, fy = kernels.linear_taps(f.height, h)
    kernels.warp_coarse_field_add(raster.data, f.data, x0, x1, fx, y0, y1, fy,
                                  np.float32(w / f.width), np.float32(h / f.height),
                                  accum)


def vanilla_reswarp(low_result: ImageBuffer, res: ResidualMap, f: MotionField,
                    cfg: ReswarpConfig) -> ReswarpResult:
    """Upsample the low result, add the warped full-resolution residual."""
    _check_base(low_result, f, cfg)
    full_w, full_h = res.size
    if full_w % low_result.width or full_h % low_result.height:
        raise DimensionMismatch(
            f"residual {full_w}x{full_h} is not a multiple of the {low_result.width}"
            f"x{low_result.height} low result"
        )
    grown = upsample(low_result, full_w, full_h, cfg.upsample_method)
    _add_warped(grown.data, res, f)
    return _finish(grown.data)


def multiscale_reswarp(low_result: ImageBuffer, pyr: ResidualPyramid, f: MotionField,
                       cfg: ReswarpConfig) -> ReswarpResult:
    """Recompose coarse-to-fine: upsample 2x, add the warped level, repeat."""
    _check_base(low_result, f, cfg)
    if pyr.base.size != low_result.size:
        raise DimensionMismatch(
            f"pyramid base {pyr.base.size} vs low result {low_result.size}"
        )
    current = low_result
    for level in reversed(pyr.levels):
        grown = upsample(current, level.width, level.height, cfg.upsample_method)
        _add_warped(grown.data, level, f)
        current = grown
    if not pyr.levels:
        current = ImageBuffer(current.data.copy())
    return _finish(current.data)


def _check_base(low_result: ImageBuffer, f: MotionField, cfg: ReswarpConfig):
    if low_result.size != (cfg.base_size, cfg.base_size):
        raise DimensionMismatch(
            f"low result is {low_result.size}, config expects "
            f"{cfg.base_size}x{cfg.base_size}"
        )
    if f.size != low_result.size:
        raise DimensionMismatch(f"field {f.size} vs low result {low_result.size}")
