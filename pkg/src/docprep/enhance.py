"""Illumination equalization (CLAHE on the HSV value plane) and gain/bias adjustment.

CLAHE here: per-tile histograms, clipped at a limit derived from tile size,
bin count, clip factor and maximum slope; clipped excess redistributed
uniformly; per-tile CDF lookup tables stitched with bilinear interpolation
between tile centers (clamped at borders).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .colorspace import (LumaCoefficients, STANDARD_LUMA, hsv_to_rgb_planes,
                         mean_luma_brightness, rgb_to_hsv_planes)
from .raster import Histogram, RasterImage, round_half_up

_REDISTRIBUTE_ROUNDS = 8


@dataclass(frozen=True)
class ClaheConfig:
    tiles_x: int = 8
    tiles_y: int = 8
    # clip_factor 100 makes the limit slope_max times the uniform bin height,
    # i.e. the working "clip limit equal to 4" with the default slope_max.
    clip_factor: float = 100.0
    gray_levels: int = 256
    slope_max: float = 4.0
    clip_limit_override: float | None = None  # direct bin-count limit

    def __post_init__(self):
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ValueError("tile counts must be >= 1")
        if not 0.0 <= self.clip_factor <= 100.0:
            raise ValueError("clip_factor must be in [0, 100]")
        if self.gray_levels < 2:
            raise ValueError("gray_levels must be >= 2")
        if self.slope_max <= 1.0:
            raise ValueError("slope_max must be > 1")


@dataclass(frozen=True, eq=False)
class HistogramMapping:
    lut: np.ndarray        # per-bin output intensity, int64
    display_min: int
    display_max: int
    cdf: np.ndarray        # cumulative probability per bin, float64


@dataclass(frozen=True)
class GainBias:
    gain: float = 1.4
    bias: float = 50.0
    ceiling: float = 0.93
    ceiling_unreachable: bool = False

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("gain must be > 0")
        if not 0.0 < self.ceiling <= 1.0:
            raise ValueError("ceiling must be in (0, 1]")


def clip_limit(config: ClaheConfig, region_size: int) -> float:
    """Bin-count clip limit: (M/N) * (1 + (alpha/100) * (S_max - 1))."""
    if config.clip_limit_override is not None:
        return config.clip_limit_override
    m = region_size
    n = config.gray_levels
    return (m / n) * (1.0 + (config.clip_factor / 100.0) * (config.slope_max - 1.0))


def clipped_mapping(hist: Histogram, beta: float,
                    display_min: int, display_max: int) -> HistogramMapping:
    """Clip bins at beta, redistribute the excess uniformly, build the CDF LUT.

    Redistribution repeats until residual excess drops below one count or the
    round cap is hit; any residual is then folded back proportionally so the
    total count is conserved.
    """
    if hist.total == 0:
        raise ValueError("cannot build a mapping from an empty histogram")
    bins = hist.bins.astype(np.float64).copy()
    for _ in range(_REDISTRIBUTE_ROUNDS):
        excess = np.maximum(bins - beta, 0.0).sum()
        bins = np.minimum(bins, beta)
        if excess < 1.0:
            break
        bins += excess / bins.size
    else:
        excess = np.maximum(bins - beta, 0.0).sum()
        bins = np.minimum(bins, beta)
        if excess > 0:
            bins += excess * bins / bins.sum()
    cdf = np.cumsum(bins) / bins.sum()
    lut = round_half_up((display_max - display_min) * cdf + display_min)
    lut = np.clip(lut, display_min, display_max).astype(np.int64)
    return HistogramMapping(lut=lut, display_min=display_min,
                            display_max=display_max, cdf=cdf)


def _tile_edges(extent: int, tiles: int) -> np.ndarray:
    return (np.arange(tiles + 1, dtype=np.int64) * extent) // tiles


def _axis_interp(extent: int, centers: np.ndarray):
    """Per-coordinate neighbor tile indices and blend fractions, clamped."""
    pos = np.arange(extent, dtype=np.float64)
    idx = np.searchsorted(centers, pos)
    t0 = np.clip(idx - 1, 0, len(centers) - 1)
    t1 = np.clip(idx, 0, len(centers) - 1)
    span = centers[t1] - centers[t0]
    frac = np.where(span > 0, (pos - centers[t0]) / np.where(span > 0, span, 1.0), 0.0)
    return t0, t1, np.clip(frac, 0.0, 1.0)


def clahe_apply(plane: RasterImage, config: ClaheConfig = ClaheConfig()) -> RasterImage:
    """Contrast-limited adaptive equalization of one plane."""
    if plane.channels != 1:
        raise ValueError("clahe_apply requires a single-channel plane")
    if plane.height < config.tiles_y or plane.width < config.tiles_x:
        raise ValueError("image smaller than one pixel per tile")
    n = config.gray_levels
    lo, hi = 0, plane.max_value
    bin_of = (plane.data.astype(np.int64) * n) // (plane.max_value + 1)

    row_edges = _tile_edges(plane.height, config.tiles_y)
    col_edges = _tile_edges(plane.width, config.tiles_x)
    luts = np.empty((config.tiles_y, config.tiles_x, n), dtype=np.int64)
    for ty in range(config.tiles_y):
        for tx in range(config.tiles_x):
            tile = bin_of[row_edges[ty]:row_edges[ty + 1],
                          col_edges[tx]:col_edges[tx + 1]]
            counts = np.bincount(tile.ravel(), minlength=n)
            beta = clip_limit(config, tile.size)
            mapping = clipped_mapping(Histogram.from_counts(counts), beta, lo, hi)
            luts[ty, tx] = mapping.lut

    centers_y = (row_edges[:-1] + row_edges[1:] - 1) / 2.0
    centers_x = (col_edges[:-1] + col_edges[1:] - 1) / 2.0
    r0, r1, fy = _axis_interp(plane.height, centers_y)
    c0, c1, fx = _axis_interp(plane.width, centers_x)

    v00 = luts[r0[:, None], c0[None, :], bin_of]
    v01 = luts[r0[:, None], c1[None, :], bin_of]
    v10 = luts[r1[:, None], c0[None, :], bin_of]
    v11 = luts[r1[:, None], c1[None, :], bin_of]
    wy = fy[:, None]
    wx = fx[None, :]
    top = (1.0 - wx) * v00 + wx * v01
    bottom = (1.0 - wx) * v10 + wx * v11
    out = (1.0 - wy) * top + wy * bottom
    out = np.clip(round_half_up(out), lo, hi)
    dtype = np.uint8 if plane.depth == 8 else np.uint16
    return RasterImage.from_array(out.astype(dtype), depth=plane.depth)


def equalize_brightness(image: RasterImage, config: ClaheConfig = ClaheConfig(),
                        working_depth: int = 16) -> RasterImage:
    """CLAHE on the HSV value plane; hue and saturation pass through untouched.

    V is quantized to the working depth (16-bit by default, so negative
    transitions survive intermediate arithmetic) and scaled back afterwards.
    """
    if image.channels != 3 or image.depth != 8:
        raise ValueError("equalize_brightness requires an 8-bit RGB image")
    if working_depth not in (8, 16):
        raise ValueError("working depth must be 8 or 16")
    h, s, v = rgb_to_hsv_planes(image)
    maxv = (1 << working_depth) - 1
    dtype = np.uint8 if working_depth == 8 else np.uint16
    v_plane = RasterImage.from_array(
        np.clip(round_half_up(v * maxv), 0, maxv).astype(dtype), depth=working_depth)
    equalized = clahe_apply(v_plane, config)
    v_new = equalized.data.astype(np.float64) / maxv
    return hsv_to_rgb_planes(h, s, v_new)


def adjust_gain_bias(image: RasterImage, gb: GainBias) -> RasterImage:
    """Per-sample gain * f + bias, rounded half-up and clamped to [0, 255]."""
    if image.depth != 8:
        raise ValueError("adjust_gain_bias expects an 8-bit image")
    out = np.clip(round_half_up(gb.gain * image.data.astype(np.float64) + gb.bias),
                  0, 255).astype(np.uint8)
    return RasterImage.from_array(out, depth=8)


def predicted_brightness(brightness: float, gain: float, bias: float) -> float:
    """Mean brightness after the gain/bias transform, ignoring clamping."""
    return (gain * brightness * 255.0 + bias) / 255.0


def auto_gain_bias(image: RasterImage, ceiling: float = 0.93,
                   coeffs: LumaCoefficients = STANDARD_LUMA) -> GainBias:
    """Search down from (1.4, 50) until predicted brightness fits the ceiling.

    Bias drops in steps of 5 to 0, then gain in steps of 0.1 toward 1.0.  The
    predictor relies on linearity of the mean and ignores clamping at 255.
    """
    brightness = mean_luma_brightness(image, coeffs)
    gain, bias = 1.4, 50.0
    while predicted_brightness(brightness, gain, bias) > ceiling:
        if bias > 0:
            bias = max(0.0, bias - 5.0)
        elif gain > 1.0:
            gain = max(1.0, round(gain - 0.1, 10))
        else:
            return GainBias(gain=1.0, bias=0.0, ceiling=ceiling,
                            ceiling_unreachable=True)
    return GainBias(gain=gain, bias=bias, ceiling=ceiling)
