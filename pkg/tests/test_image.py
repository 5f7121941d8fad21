import numpy as np
import pytest
from hypothesis import given, strategies as st

from atw import ImageBuffer
from atw.errors import DimensionMismatch
from atw.image import from_u8, to_u8

from conftest import random_image


def test_shape_and_properties():
    img = ImageBuffer(np.zeros((4, 6, 3), dtype=np.float32))
    assert (img.width, img.height, img.channels) == (6, 4, 3)
    assert img.size == (6, 4)
    assert img.data.size == 6 * 4 * 3


def test_2d_input_gains_channel_axis():
    img = ImageBuffer(np.zeros((2, 3)))
    assert img.channels == 1
    assert img.data.dtype == np.float32


@pytest.mark.parametrize("shape", [(0, 4, 1), (4, 0, 3), (2, 2, 2), (2, 2, 4)])
def test_invalid_shapes_rejected(shape):
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros(shape, dtype=np.float32))


def test_require_same_shape():
    a = ImageBuffer.zeros(4, 4)
    b = ImageBuffer.zeros(4, 5)
    with pytest.raises(DimensionMismatch):
        a.require_same_shape(b)


def test_u8_endpoints():
    img = from_u8(np.array([[[0], [255]]], dtype=np.uint8))
    assert img.data[0, 0, 0] == -1.0
    assert img.data[0, 1, 0] == 1.0


def test_u8_midpoint_value():
    # 2 * (128/255) - 1 = 0.00392157
    img = from_u8(np.array([[[128]]], dtype=np.uint8))
    assert img.data[0, 0, 0] == pytest.approx(0.0039215684, abs=1e-7)


def test_u8_round_trip_within_one_step(rng):
    img = random_image(rng, 16, 16, amplitude=1.0)
    back = from_u8(to_u8(img))
    assert np.max(np.abs(back.data - img.data)) <= 1.0 / 255.0 + 1e-7


@given(st.integers(min_value=0, max_value=255))
def test_u8_is_exactly_recoverable(value):
    # every 8-bit code survives the signed-range round trip bit-for-bit
    raw = np.full((1, 1, 1), value, dtype=np.uint8)
    assert to_u8(from_u8(raw))[0, 0, 0] == value


def test_constant_and_zeros_constructors():
    c = ImageBuffer.constant(3, 2, 0.25, channels=3)
    assert c.data.shape == (2, 3, 3)
    assert np.all(c.data == np.float32(0.25))
    z = ImageBuffer.zeros(5, 4)
    assert not z.data.any()
