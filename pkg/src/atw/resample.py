"""Down- and up-sampling of image rasters.

Down-sampling is block averaging (the image is divided into a target_w x
target_h grid of equal blocks and each block is averaged). Up-sampling offers
nearest, bilinear and bicubic (Catmull-Rom, a = -0.5) kernels with
half-pixel-center positions and clamp-at-border.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from . import kernels
from .errors import DownscaleNotSupported, NonDivisibleDimensions
from .image import ImageBuffer

__all__ = ["ResamplingMethod", "downsample_average", "upsample"]


class ResamplingMethod(str, Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"
    BICUBIC = "bicubic"


def downsample_average(img: ImageBuffer, target_w: int, target_h: int) -> ImageBuffer:
    """Average equal blocks so the result is target_w x target_h.

    Raises NonDivisibleDimensions unless both source dimensions are exact
    multiples of the target. The global mean is preserved.
    """
    if target_w < 1 or target_h < 1:
        raise NonDivisibleDimensions(f"target {target_w}x{target_h} is degenerate")
    if img.width % target_w or img.height % target_h:
        raise NonDivisibleDimensions(
            f"{img.width}x{img.height} not divisible into a {target_w}x{target_h} grid"
        )
    out = np.empty((target_h, target_w, img.channels), dtype=np.float32)
    kernels.block_mean(img.data, out)
    return ImageBuffer(out)


def _resize_array(data: np.ndarray, target_w: int, target_h: int,
                  method: ResamplingMethod) -> np.ndarray:
    """Resize an (H, W, C) float32 array; no direction checks."""
    h, w = data.shape[:2]
    if (w, h) == (target_w, target_h):
        return data.copy()
    out = np.empty((target_h, target_w, data.shape[2]), dtype=np.float32)
    if method == ResamplingMethod.NEAREST:
        kernels.resize_nearest(data, out, kernels.nearest_taps(w, target_w),
                               kernels.nearest_taps(h, target_h))
    elif method == ResamplingMethod.BILINEAR:
        x0, x1, fx = kernels.linear_taps(w, target_w)
        y0, y1, fy = kernels.linear_taps(h, target_h)
        kernels.resize_bilinear(data, out, x0, x1, fx, y0, y1, fy)
    elif method == ResamplingMethod.BICUBIC:
        xidx, xw = kernels.cubic_taps(w, target_w)
        yidx, yw = kernels.cubic_taps(h, target_h)
        kernels.resize_bicubic(data, out, xidx, xw, yidx, yw)
    else:
        raise ValueError(f"unknown resampling method {method!r}")
    return out


def upsample(img: ImageBuffer, target_w: int, target_h: int,
             method: ResamplingMethod = ResamplingMethod.BILINEAR) -> ImageBuffer:
    """Enlarge (or copy) an image; shrinking any axis is rejected."""
    if target_w < img.width or target_h < img.height:
        raise DownscaleNotSupported(
            f"target {target_w}x{target_h} smaller than source {img.width}x{img.height}"
        )
    return ImageBuffer(_resize_array(img.data, target_w, target_h, ResamplingMethod(method)))
