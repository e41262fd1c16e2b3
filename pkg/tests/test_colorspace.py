import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_rgb
from docprep.colorspace import (PAPER_LITERAL_LUMA, STANDARD_LUMA, hsv_to_rgb,
                                hsv_to_rgb_planes, hue_arccos, luma,
                                mean_luma_brightness, rgb_to_hsv,
                                rgb_to_hsv_planes, to_grayscale_luminance)
from docprep.raster import RasterImage

channel = st.integers(0, 255)


def test_pure_red():
    assert rgb_to_hsv(255, 0, 0) == (0.0, 1.0, 1.0)


def test_neutral_gray():
    h, s, v = rgb_to_hsv(128, 128, 128)
    assert h == 0.0 and s == 0.0
    assert v == pytest.approx(128 / 255)


def test_pure_green():
    h, s, v = rgb_to_hsv(0, 255, 0)
    assert h == pytest.approx(120.0) and s == 1.0 and v == 1.0
    # the arccos formulation agrees at the sector boundary:
    # numerator -127.5, denominator 255, arccos(-0.5) = 120 degrees
    assert hue_arccos(0, 255, 0) == pytest.approx(120.0)


def test_hue_arccos_close_to_sector_hue():
    # the two hue formulations agree within ~1.12 degrees everywhere
    rng = np.random.default_rng(5)
    for r, g, b in rng.integers(0, 256, (500, 3)).tolist():
        if r == g == b:
            continue
        h, _, _ = rgb_to_hsv(r, g, b)
        d = abs(h - hue_arccos(r, g, b))
        assert min(d, 360 - d) < 1.2


def test_hsv_to_rgb_primaries():
    assert hsv_to_rgb(0, 1, 1) == (255, 0, 0)
    assert hsv_to_rgb(120, 1, 1) == (0, 255, 0)
    assert hsv_to_rgb(240, 1, 1) == (0, 0, 255)


@settings(max_examples=300, deadline=None)
@given(channel, channel, channel)
def test_roundtrip_within_one(r, g, b):
    rr, gg, bb = hsv_to_rgb(*rgb_to_hsv(r, g, b))
    assert max(abs(rr - r), abs(gg - g), abs(bb - b)) <= 1


@settings(max_examples=200, deadline=None)
@given(channel)
def test_neutral_convention(value):
    h, s, v = rgb_to_hsv(value, value, value)
    assert h == 0.0 and s == 0.0


@settings(max_examples=200, deadline=None)
@given(channel, channel, channel)
def test_value_is_max_over_255(r, g, b):
    _, _, v = rgb_to_hsv(r, g, b)
    assert v == max(r, g, b) / 255


def test_luma_white_standard():
    assert luma(255, 255, 255, STANDARD_LUMA) == pytest.approx(255.0)


def test_luma_black():
    assert luma(0, 0, 0, PAPER_LITERAL_LUMA) == 0.0


def test_luma_white_paper_literal():
    # the printed 0.144 coefficient makes the weights sum to 1.03
    assert luma(255, 255, 255, PAPER_LITERAL_LUMA) == pytest.approx(262.65)


@settings(max_examples=100, deadline=None)
@given(channel, channel, channel, st.integers(0, 2))
def test_luma_monotone_and_bounded(r, g, b, axis):
    base = luma(r, g, b)
    assert 0.0 <= base <= 255.0
    bumped = [r, g, b]
    if bumped[axis] < 255:
        bumped[axis] += 1
        assert luma(*bumped) > base


def test_mean_brightness_white_and_black():
    white = RasterImage.from_array(np.full((4, 4, 3), 255, dtype=np.uint8))
    black = RasterImage.from_array(np.zeros((4, 4, 3), dtype=np.uint8))
    assert mean_luma_brightness(white) == pytest.approx(1.0)
    assert mean_luma_brightness(black) == 0.0


def test_mean_brightness_half_and_half():
    arr = np.zeros((2, 2, 3), dtype=np.uint8)
    arr[0] = 255
    img = RasterImage.from_array(arr)
    assert mean_luma_brightness(img) == pytest.approx(0.5)


def test_grayscale_equal_channels_identity():
    img = RasterImage.from_array(np.full((3, 3, 3), 100, dtype=np.uint8))
    assert to_grayscale_luminance(img).data.tolist() == [[100] * 3] * 3


def test_grayscale_rounding():
    red = RasterImage.from_array(np.array([[[255, 0, 0]]], dtype=np.uint8))
    blue = RasterImage.from_array(np.array([[[0, 0, 255]]], dtype=np.uint8))
    assert to_grayscale_luminance(red).data[0, 0] == 77    # 76.5 rounds up
    assert to_grayscale_luminance(blue).data[0, 0] == 28   # 28.05 rounds down


def test_plane_conversion_matches_scalar(rng):
    img = random_rgb(rng, 5, 7)
    h, s, v = rgb_to_hsv_planes(img)
    for i in range(5):
        for j in range(7):
            hh, ss, vv = rgb_to_hsv(*img.data[i, j].tolist())
            assert (h[i, j], s[i, j], v[i, j]) == pytest.approx((hh, ss, vv))
    back = hsv_to_rgb_planes(h, s, v)
    assert np.abs(back.data.astype(int) - img.data.astype(int)).max() <= 1
