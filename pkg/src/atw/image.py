"""Image buffers: float32 rasters with samples nominally in [-1, 1].

An ImageBuffer wraps an (H, W, C) float32 array, C in {1, 3}. Residual maps
reuse the same container; their samples live in [-2, 2] after subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

__all__ = ["ImageBuffer", "ResidualMap", "from_u8", "to_u8"]


@dataclass(frozen=True)
class ImageBuffer:
    """Row-major float32 raster, shape (height, width, channels)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"expected 2D or 3D array, got ndim={arr.ndim}")
        if arr.shape[2] not in (1, 3):
            raise ValueError(f"channel count must be 1 or 3, got {arr.shape[2]}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"degenerate image shape {arr.shape}")
        if arr.dtype != np.float32:
            arr = arr.astype(np.float32)
        object.__setattr__(self, "data", np.ascontiguousarray(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def size(self) -> tuple[int, int]:
        """(width, height) in pixels."""
        return self.data.shape[1], self.data.shape[0]

    @classmethod
    def constant(cls, width: int, height: int, value: float, channels: int = 1) -> "ImageBuffer":
        return cls(np.full((height, width, channels), value, dtype=np.float32))

    @classmethod
    def zeros(cls, width: int, height: int, channels: int = 1) -> "ImageBuffer":
        return cls(np.zeros((height, width, channels), dtype=np.float32))

    def same_shape(self, other: "ImageBuffer") -> bool:
        return self.data.shape == other.data.shape

    def require_same_shape(self, other: "ImageBuffer", what: str = "rasters"):
        if not self.same_shape(other):
            raise DimensionMismatch(
                f"{what} differ: {self.data.shape} vs {other.data.shape}"
            )


# Residual maps share the pixel container; values nominally in [-2, 2].
ResidualMap = ImageBuffer


def from_u8(raw: np.ndarray) -> ImageBuffer:
    """Map 8-bit samples linearly onto [-1, 1] (0 -> -1.0, 255 -> +1.0)."""
    arr = np.asarray(raw)
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 samples, got {arr.dtype}")
    return ImageBuffer(arr.astype(np.float32) * np.float32(2.0 / 255.0) - np.float32(1.0))


def to_u8(img: ImageBuffer) -> np.ndarray:
    """Quantize samples to 8 bits; values are clipped to [-1, 1] first."""
    scaled = (np.clip(img.data, -1.0, 1.0) + 1.0) * (255.0 / 2.0)
    return np.rint(scaled).astype(np.uint8)
