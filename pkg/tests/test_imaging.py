import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from robonav.imaging import (
    ImageRGB,
    PpmError,
    histogram,
    read_ppm,
    scale_illumination,
    write_ppm,
)

from oracles import naive_histogram


def images(max_side=12):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side)).flatmap(
        lambda wh: arrays(np.uint8, (wh[1], wh[0], 3)).map(ImageRGB.from_array)
    )


def test_read_p6_single_pixel():
    img = read_ppm(b"P6 1 1 255\n" + bytes([255, 0, 0]))
    assert (img.width, img.height) == (1, 1)
    assert img.pixel(0, 0) == (255, 0, 0)


def test_read_p3_two_pixels():
    img = read_ppm(b"P3 2 1 255  0 0 0  255 255 255")
    assert (img.width, img.height) == (2, 1)
    assert img.pixel(0, 0) == (0, 0, 0)
    assert img.pixel(1, 0) == (255, 255, 255)


def test_write_black_pixel_p6():
    assert write_ppm(ImageRGB.filled(1, 1)) == b"P6\n1 1\n255\n\x00\x00\x00"


def test_write_is_row_major():
    arr = np.zeros((2, 2, 3), dtype=np.uint8)
    arr[0, 0] = (1, 1, 1)  # (u=0, v=0)
    arr[0, 1] = (2, 2, 2)  # (1, 0)
    arr[1, 0] = (3, 3, 3)  # (0, 1)
    arr[1, 1] = (4, 4, 4)  # (1, 1)
    body = write_ppm(ImageRGB.from_array(arr))[len(b"P6\n2 2\n255\n"):]
    assert body == bytes([1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4])


def test_write_p3_one_pixel_per_line():
    img = ImageRGB.from_array(np.array([[[1, 2, 3], [4, 5, 6]]], dtype=np.uint8))
    assert write_ppm(img, "P3") == b"P3\n2 1\n255\n1 2 3\n4 5 6\n"


def test_header_comments_accepted_and_dropped():
    data = b"P6\n# made by hand\n2 1 # width height\n255\n" + bytes(range(6))
    img = read_ppm(data)
    assert write_ppm(img) == b"P6\n2 1\n255\n" + bytes(range(6))


@given(images())
@settings(max_examples=60, deadline=None)
def test_roundtrip_both_formats(img):
    assert read_ppm(write_ppm(img, "P6")) == img
    assert read_ppm(write_ppm(img, "P3")) == img


@pytest.mark.parametrize(
    "data, offset",
    [
        (b"P5 1 1 255\n\x00", 0),
        (b"P6 1 1 65535\n\x00\x00\x00", 7),
        (b"P6 2 2 255\n" + bytes(5), 16),
        (b"P6 0 1 255\n", 3),
        (b"P6 x 1 255\n", 3),
        (b"P3 1 1 255 0 0", 14),
        (b"P3 1 1 255 0 0 256", 15),
    ],
)
def test_malformed_reports_offset(data, offset):
    with pytest.raises(PpmError) as exc:
        read_ppm(data)
    assert exc.value.offset == offset
    assert "byte offset" in str(exc.value)


def test_image_rejects_wrong_shape():
    with pytest.raises(ValueError):
        ImageRGB(2, 2, np.zeros((2, 3, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        ImageRGB(0, 1, np.zeros((1, 0, 3), dtype=np.uint8))


def test_image_is_immutable():
    arr = np.zeros((2, 2, 3), dtype=np.uint8)
    img = ImageRGB.from_array(arr)
    arr[0, 0] = 9
    assert img.pixel(0, 0) == (0, 0, 0)
    with pytest.raises(ValueError):
        img.pixels[0, 0, 0] = 1


def test_histogram_uniform():
    img = ImageRGB.filled(2, 2, (10, 20, 30))
    h = histogram(img, "G")
    assert h.bins[20] == 4
    assert sum(h.bins) == 4 and all(b == 0 for k, b in enumerate(h.bins) if k != 20)


@given(images(max_side=16))
@settings(max_examples=40, deadline=None)
def test_histogram_matches_recount_and_conserves_mass(img):
    for idx, ch in enumerate("RGB"):
        h = histogram(img, ch)
        assert list(h.bins) == naive_histogram(img.pixels, idx)
        assert h.total == img.width * img.height
        assert min(h.bins) >= 0


def test_scale_illumination_examples():
    img = ImageRGB.from_array(np.array([[[100, 50, 200], [200, 10, 10]]], dtype=np.uint8))
    assert scale_illumination(img, 1.0) == img
    assert scale_illumination(img, 0.5).pixel(0, 0) == (50, 25, 100)
    assert scale_illumination(img, 1.5).pixel(1, 0) == (255, 15, 15)


def test_scale_illumination_rounds_half_away_from_zero():
    img = ImageRGB.from_array(np.array([[[1, 3, 5]]], dtype=np.uint8))
    # 0.5, 1.5, 2.5 -> 1, 2, 3 (half-to-even would give 0, 2, 2)
    assert scale_illumination(img, 0.5).pixel(0, 0) == (1, 2, 3)


@pytest.mark.parametrize("factor", [0.0, -1.0])
def test_scale_illumination_rejects_non_positive(factor):
    with pytest.raises(ValueError):
        scale_illumination(ImageRGB.filled(1, 1), factor)


@given(images(8), st.floats(0.1, 3.0), st.floats(0.1, 3.0))
@settings(max_examples=40, deadline=None)
def test_scale_illumination_monotone(img, f1, f2):
    lo, hi = sorted((f1, f2))
    a = scale_illumination(img, lo).pixels.astype(int)
    b = scale_illumination(img, hi).pixels.astype(int)
    assert np.all(a <= b)
