import numpy as np
import pytest
from PIL import Image

from atw import (
    ImageBuffer,
    build_laplacian_pyramid,
    load_image,
    load_raster,
    read_pyramid_dir,
    save_image,
    save_raster,
    write_pyramid_dir,
)
from atw.errors import BadMagic, IoFailure, TruncatedFile, UnsupportedFormat
from atw.formats import residual_preview

from conftest import random_image


@pytest.mark.parametrize("suffix,channels", [(".png", 3), (".png", 1), (".ppm", 3), (".pgm", 1)])
def test_image_round_trip(tmp_path, rng, suffix, channels):
    img = random_image(rng, 20, 14, channels=channels, amplitude=1.0)
    path = tmp_path / f"img{suffix}"
    save_image(img, path)
    back = load_image(path)
    assert back.data.shape == img.data.shape
    assert np.max(np.abs(back.data - img.data)) <= 1.0 / 255.0 + 1e-7


def test_zero_buffer_round_trip(tmp_path):
    img = ImageBuffer.zeros(8, 8, 3)
    path = tmp_path / "zero.png"
    save_image(img, path)
    assert np.max(np.abs(load_image(path).data)) <= 1.0 / 255.0 + 1e-7


def test_unsupported_extension(tmp_path):
    with pytest.raises(UnsupportedFormat):
        save_image(ImageBuffer.zeros(2, 2), tmp_path / "img.tiff")
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "img.jpg")


def test_load_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        load_image(tmp_path / "nope.png")


def test_png_bytes_masquerading_as_other_format(tmp_path):
    path = tmp_path / "fake.png"
    path.write_bytes(b"not a png at all")
    with pytest.raises(IoFailure):
        load_image(path)


def test_raster_round_trip_is_bit_exact(tmp_path, rng):
    img = ImageBuffer(rng.uniform(-2, 2, (9, 7, 3)).astype(np.float32))
    path = tmp_path / "r.atwr"
    save_raster(img, path)
    back = load_raster(path)
    assert np.array_equal(back.data, img.data)


def test_raster_bad_magic(tmp_path):
    path = tmp_path / "r.atwr"
    path.write_bytes(b"WRNG" + bytes(12))
    with pytest.raises(BadMagic):
        load_raster(path)


def test_raster_truncated(tmp_path):
    img = ImageBuffer.zeros(4, 4, 3)
    path = tmp_path / "r.atwr"
    save_raster(img, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-8])
    with pytest.raises(TruncatedFile):
        load_raster(path)
    path.write_bytes(blob[:10])
    with pytest.raises(TruncatedFile):
        load_raster(path)


def test_pyramid_dir_round_trip(tmp_path, rng):
    img = random_image(rng, 64, 64)
    pyr = build_laplacian_pyramid(img, base_size=16)
    manifest = write_pyramid_dir(pyr, tmp_path / "pyr")
    assert manifest.exists()
    names = {p.name for p in (tmp_path / "pyr").iterdir()}
    assert {"base.png", "base.atwr", "manifest.json"} <= names
    assert "level_01.atwr" in names and "level_01.png" in names
    back = read_pyramid_dir(tmp_path / "pyr")
    assert back.depth == pyr.depth
    assert np.array_equal(back.base.data, pyr.base.data)
    for a, b in zip(back.levels, pyr.levels):
        assert np.array_equal(a.data, b.data)


def test_residual_preview_offset_encoding():
    res = ImageBuffer(np.array([[-2.0, 0.0, 2.0]], dtype=np.float32))
    raw = np.asarray(residual_preview(res))
    assert raw.ravel().tolist() == [0, 128, 255]


def test_preview_files_decode_near_residual(tmp_path, rng):
    img = random_image(rng, 32, 32)
    pyr = build_laplacian_pyramid(img, base_size=16)
    write_pyramid_dir(pyr, tmp_path / "p")
    with Image.open(tmp_path / "p" / "level_01.png") as im:
        decoded = np.asarray(im, dtype=np.float32) / 255.0 * 4.0 - 2.0
    assert np.max(np.abs(decoded - pyr.levels[0].data[:, :, :])) <= 4.0 / 255.0
