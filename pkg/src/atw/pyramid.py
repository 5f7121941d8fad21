"""Residual computation and Laplacian pyramids.

A pyramid holds residual levels finest-first: levels[0] is full resolution,
each following level is half the size, and `base` is the final base_size x
base_size image after the last halving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionMismatch, IncompatibleDimensions, MalformedPyramid
from .image import ImageBuffer, ResidualMap
from .resample import ResamplingMethod, downsample_average, upsample

__all__ = ["ResidualPyramid", "residual", "build_laplacian_pyramid", "reconstruct_pyramid"]


def residual(original: ImageBuffer, approx: ImageBuffer) -> ResidualMap:
    """Per-sample difference original - approx (the high-frequency part)."""
    original.require_same_shape(approx, "residual operands")
    return ImageBuffer(original.data - approx.data)


@dataclass(frozen=True)
class ResidualPyramid:
    """Residual levels finest-first plus the low-resolution base image."""

    levels: list[ResidualMap] = field(default_factory=list)
    base: ImageBuffer = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.base is None:
            raise MalformedPyramid("pyramid has no base image")
        chain = list(self.levels) + [self.base]
        for finer, coarser in zip(chain, chain[1:]):
            if finer.width != 2 * coarser.width or finer.height != 2 * coarser.height:
                raise MalformedPyramid(
                    f"level {finer.size} is not exactly 2x the next level {coarser.size}"
                )
            if finer.channels != coarser.channels:
                raise MalformedPyramid("pyramid levels disagree on channel count")

    @property
    def base_size(self) -> int:
        return self.base.width

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def full_size(self) -> tuple[int, int]:
        top = self.levels[0] if self.levels else self.base
        return top.size


def _halving_steps(width: int, height: int, base_size: int) -> int:
    """Number of 2x halvings from (width, height) down to the square base."""
    if width != height:
        raise IncompatibleDimensions(
            f"multiscale decomposition needs a square image, got {width}x{height}"
        )
    steps = 0
    size = width
    while size > base_size:
        if size % 2:
            break
        size //= 2
        steps += 1
    if size != base_size:
        raise IncompatibleDimensions(
            f"{width}x{height} is not base_size x 2^K for base_size={base_size}"
        )
    return steps


def build_laplacian_pyramid(img: ImageBuffer, base_size: int = 128,
                            method: ResamplingMethod = ResamplingMethod.BILINEAR,
                            ) -> ResidualPyramid:
    """Decompose by repeated halving: level_k = L_{k-1} - upsample(L_k).

    Each halving is a 2x2 block average; the residual at each scale is taken
    against the up-sampled half-size image (bilinear by default). The input
    must be square with side base_size * 2^K.
    """
    steps = _halving_steps(img.width, img.height, base_size)
    levels: list[ResidualMap] = []
    current = img
    for _ in range(steps):
        halved = downsample_average(current, current.width // 2, current.height // 2)
        if method == ResamplingMethod.BILINEAR:
            # fused upsample-and-subtract, bit-identical to the generic path
            out = np.empty_like(current.data)
            x0, x1, fx = kernels.linear_taps(halved.width, current.width)
            y0, y1, fy = kernels.linear_taps(halved.height, current.height)
            kernels.upsample_sub(current.data, halved.data, out, x0, x1, fx, y0, y1, fy)
            levels.append(ImageBuffer(out))
        else:
            approx = upsample(halved, current.width, current.height, method)
            levels.append(residual(current, approx))
        current = halved
    return ResidualPyramid(levels=levels, base=current)


def reconstruct_pyramid(pyr: ResidualPyramid,
                        method: ResamplingMethod = ResamplingMethod.BILINEAR,
                        ) -> ImageBuffer:
    """Invert build_laplacian_pyramid: repeatedly upsample 2x and add a level."""
    current = pyr.base
    for level in reversed(pyr.levels):
        grown = upsample(current, level.width, level.height, method)
        current = ImageBuffer(grown.data + level.data)
    return current
