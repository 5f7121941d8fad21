"""File formats: PNG/PPM images, ATWR float rasters, pyramid directories.

ATWR is the lossless float path: magic "ATWR", little-endian u32 width,
height, channels, then float32 samples row-major. Residual PNG previews use
the offset encoding value = (r + 2) / 4 so the [-2, 2] range fits 8 bits;
the .atwr side-car next to each preview is authoritative.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import BadMagic, IoFailure, TruncatedFile, UnsupportedFormat
from .image import ImageBuffer, from_u8, to_u8
from .pyramid import ResidualPyramid

__all__ = [
    "load_image",
    "save_image",
    "load_raster",
    "save_raster",
    "write_pyramid_dir",
    "read_pyramid_dir",
    "residual_preview",
]

_IMAGE_SUFFIXES = {".png", ".ppm", ".pgm"}
_RASTER_MAGIC = b"ATWR"


def load_image(path) -> ImageBuffer:
    """Read an 8-bit PNG or binary PPM/PGM and map samples onto [-1, 1]."""
    path = Path(path)
    if path.suffix.lower() not in _IMAGE_SUFFIXES:
        raise UnsupportedFormat(f"unsupported image extension {path.suffix!r} ({path})")
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise UnsupportedFormat(f"{path}: format {im.format} not supported")
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB" if len(im.getbands()) > 1 else "L")
            arr = np.asarray(im, dtype=np.uint8)
    except OSError as exc:
        raise IoFailure(f"cannot read image {path}: {exc}") from exc
    return from_u8(arr)


def save_image(img: ImageBuffer, path) -> None:
    """Quantize to 8 bits and write PNG or binary PPM/PGM by extension."""
    path = Path(path)
    if path.suffix.lower() not in _IMAGE_SUFFIXES:
        raise UnsupportedFormat(f"unsupported image extension {path.suffix!r} ({path})")
    raw = to_u8(img)
    pil = Image.fromarray(raw[:, :, 0] if img.channels == 1 else raw)
    try:
        pil.save(path)
    except OSError as exc:
        raise IoFailure(f"cannot write image {path}: {exc}") from exc


def save_raster(img: ImageBuffer, path) -> None:
    """Write the lossless ATWR float32 raster."""
    header = _RASTER_MAGIC + struct.pack("<III", img.width, img.height, img.channels)
    payload = np.ascontiguousarray(img.data, dtype="<f4").tobytes()
    try:
        Path(path).write_bytes(header + payload)
    except OSError as exc:
        raise IoFailure(f"cannot write raster {path}: {exc}") from exc


def load_raster(path) -> ImageBuffer:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read raster {path}: {exc}") from exc
    if len(blob) < 16:
        raise TruncatedFile(f"{path}: shorter than the 16-byte header")
    if blob[:4] != _RASTER_MAGIC:
        raise BadMagic(f"{path}: expected magic {_RASTER_MAGIC!r}, found {blob[:4]!r}")
    width, height, channels = struct.unpack("<III", blob[4:16])
    expected = width * height * channels * 4
    if len(blob) - 16 < expected:
        raise TruncatedFile(
            f"{path}: payload holds {len(blob) - 16} bytes, header declares {expected}"
        )
    data = np.frombuffer(blob, dtype="<f4", count=width * height * channels, offset=16)
    return ImageBuffer(data.reshape(height, width, channels).copy())


def residual_preview(img: ImageBuffer) -> Image.Image:
    """Offset-encode a residual ([-2, 2] -> [0, 1]) for an 8-bit preview."""
    enc = np.clip((img.data + 2.0) / 4.0, 0.0, 1.0)
    raw = np.rint(enc * 255.0).astype(np.uint8)
    return Image.fromarray(raw[:, :, 0] if img.channels == 1 else raw)


def write_pyramid_dir(pyr: ResidualPyramid, out_dir) -> Path:
    """Serialize a pyramid: base PNG plus per-level ATWR + preview PNG."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "kind": "residual_pyramid",
        "base_size": pyr.base_size,
        "channels": pyr.base.channels,
        "base": "base.png",
        "levels": [],
    }
    save_image(pyr.base, out_dir / "base.png")
    save_raster(pyr.base, out_dir / "base.atwr")
    manifest["base_raster"] = "base.atwr"
    for k, level in enumerate(pyr.levels, start=1):
        atwr = f"level_{k:02d}.atwr"
        png = f"level_{k:02d}.png"
        save_raster(level, out_dir / atwr)
        try:
            residual_preview(level).save(out_dir / png)
        except OSError as exc:
            raise IoFailure(f"cannot write preview {out_dir / png}: {exc}") from exc
        manifest["levels"].append(
            {"width": level.width, "height": level.height, "raster": atwr, "preview": png}
        )
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return out_dir / "manifest.json"


def read_pyramid_dir(dir_path) -> ResidualPyramid:
    """Rebuild a pyramid from the lossless ATWR side-cars."""
    dir_path = Path(dir_path)
    manifest_path = dir_path / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read {manifest_path}: {exc}") from exc
    base = load_raster(dir_path / manifest["base_raster"])
    levels = [load_raster(dir_path / entry["raster"]) for entry in manifest["levels"]]
    return ResidualPyramid(levels=levels, base=base)
