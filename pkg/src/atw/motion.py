"""Motion fields: per-pixel (dx, dy) displacements and backward warping.

Displacements are stored in pixel units of the field's own raster; positive
dx points right, positive dy points down. Warping is backward with bilinear
sampling: out(x, y) = in(x + dx, y + dy), source coordinates clamped to the
border. The ATWF file format carries both plain and normalized fields.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    AlphaOutOfRange,
    BadMagic,
    DimensionMismatch,
    DownscaleNotSupported,
    IoFailure,
    TruncatedFile,
)
from .image import ImageBuffer

__all__ = [
    "MotionField",
    "NormalizedField",
    "scale_field",
    "upsample_field",
    "interpolate_field",
    "warp",
    "save_field",
    "save_normalized_field",
    "load_field",
    "read_field_file",
]

_FIELD_MAGIC = b"ATWF"
_FLAG_NORMALIZED = 1


@dataclass(frozen=True)
class MotionField:
    """(H, W, 2) float32 displacements in this raster's own pixel units."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"motion field must be (H, W, 2), got {arr.shape}")
        if arr.dtype != np.float32:
            arr = arr.astype(np.float32)
        if not np.all(np.isfinite(arr)):
            raise ValueError("motion field contains non-finite displacements")
        object.__setattr__(self, "data", np.ascontiguousarray(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def size(self) -> tuple[int, int]:
        return self.data.shape[1], self.data.shape[0]

    @property
    def dx(self) -> np.ndarray:
        return self.data[:, :, 0]

    @property
    def dy(self) -> np.ndarray:
        return self.data[:, :, 1]

    @classmethod
    def zeros(cls, width: int, height: int) -> "MotionField":
        return cls(np.zeros((height, width, 2), dtype=np.float32))


@dataclass(frozen=True)
class NormalizedField:
    """Raw bounded field in [-1, 1] plus the pixels-per-unit scale factor.

    The default factor of 10 px (at 128x128) is a convention, not a derived
    constant; generators may declare their own.
    """

    data: np.ndarray
    scale_factor: float = 10.0

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"normalized field must be (H, W, 2), got {arr.shape}")
        if arr.dtype != np.float32:
            arr = arr.astype(np.float32)
        if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0):
            raise ValueError("normalized field values must be finite and within [-1, 1]")
        if not self.scale_factor > 0:
            raise ValueError(f"scale_factor must be positive, got {self.scale_factor}")
        object.__setattr__(self, "data", np.ascontiguousarray(arr))


def scale_field(nf: NormalizedField) -> MotionField:
    """Convert a bounded field to pixel units: every component * scale_factor."""
    return MotionField(nf.data * np.float32(nf.scale_factor))


def upsample_field(f: MotionField, target_w: int, target_h: int) -> MotionField:
    """Bilinearly enlarge a field, rescaling displacements to target units.

    dx is multiplied by target_w / source_w and dy by target_h / source_h so
    the displacement stays geometrically the same motion at the new size.
    """
    if target_w < f.width or target_h < f.height:
        raise DownscaleNotSupported(
            f"field target {target_w}x{target_h} smaller than {f.width}x{f.height}"
        )
    if (target_w, target_h) == f.size:
        return MotionField(f.data.copy())
    out = np.empty((target_h, target_w, 2), dtype=np.float32)
    x0, x1, fx = kernels.linear_taps(f.width, target_w)
    y0, y1, fy = kernels.linear_taps(f.height, target_h)
    kernels.resize_bilinear(f.data, out, x0, x1, fx, y0, y1, fy)
    out[:, :, 0] *= np.float32(target_w / f.width)
    out[:, :, 1] *= np.float32(target_h / f.height)
    return MotionField(out)


def interpolate_field(f: MotionField, alpha: float) -> MotionField:
    """Scale every displacement by alpha in [0, 1] (alpha=0: no motion)."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    return MotionField(f.data * np.float32(alpha))


def warp(img: ImageBuffer, f: MotionField) -> ImageBuffer:
    """Backward-warp an image (or residual map) by a same-size motion field."""
    if (img.width, img.height) != f.size:
        raise DimensionMismatch(
            f"image {img.width}x{img.height} vs field {f.width}x{f.height}"
        )
    out = np.empty_like(img.data)
    kernels.warp_bilinear(img.data, f.dx, f.dy, out)
    return ImageBuffer(out)


def save_field(f: MotionField, path) -> None:
    """Write a plain pixel-unit field as ATWF (flags=0, scale recorded as 1)."""
    _write_atwf(path, f.data, flags=0, scale_factor=1.0)


def save_normalized_field(nf: NormalizedField, path) -> None:
    """Write a bounded field as ATWF with the normalized flag set."""
    _write_atwf(path, nf.data, flags=_FLAG_NORMALIZED, scale_factor=nf.scale_factor)


def _write_atwf(path, data: np.ndarray, flags: int, scale_factor: float) -> None:
    h, w = data.shape[:2]
    header = _FIELD_MAGIC + struct.pack("<IIIf", w, h, flags, scale_factor)
    try:
        Path(path).write_bytes(header + np.ascontiguousarray(data, dtype="<f4").tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write field {path}: {exc}") from exc


def read_field_file(path) -> MotionField | NormalizedField:
    """Parse an ATWF file into whichever field kind its flags declare."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read field {path}: {exc}") from exc
    if len(blob) < 20:
        raise TruncatedFile(f"{path}: shorter than the 20-byte header")
    if blob[:4] != _FIELD_MAGIC:
        raise BadMagic(f"{path}: expected magic {_FIELD_MAGIC!r}, found {blob[:4]!r}")
    width, height, flags, scale_factor = struct.unpack("<IIIf", blob[4:20])
    expected = width * height * 2 * 4
    if len(blob) - 20 < expected:
        raise TruncatedFile(
            f"{path}: payload holds {len(blob) - 20} bytes, header declares {expected}"
        )
    data = np.frombuffer(blob, dtype="<f4", count=width * height * 2, offset=20)
    data = data.reshape(height, width, 2).copy()
    if flags & _FLAG_NORMALIZED:
        return NormalizedField(data, scale_factor=scale_factor)
    return MotionField(data)


def load_field(path) -> MotionField:
    """Load an ATWF field in pixel units; normalized files are scaled on load."""
    field = read_field_file(path)
    if isinstance(field, NormalizedField):
        return scale_field(field)
    return field
