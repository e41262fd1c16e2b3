"""Color mathematics: RGB<->HSV (arccos hue form), luma brightness, luminance grayscale.

Hue is computed with the arccos formulation rather than the cheaper hexcone
max/min form so tests can compare against the formula verbatim.  Neutral
pixels (R == G == B) get H = 0 and S = 0 by convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import RasterImage, round_half_up


@dataclass(frozen=True)
class LumaCoefficients:
    wR: float
    wG: float
    wB: float


#: ITU-R BT.601 weights; sum to 1.
STANDARD_LUMA = LumaCoefficients(0.299, 0.587, 0.114)
#: Weights with the B coefficient transposed to 0.144; sum to 1.03 and can
#: push luma above 255.  Kept selectable for comparison runs.
PAPER_LITERAL_LUMA = LumaCoefficients(0.299, 0.587, 0.144)

#: Grayscale-stage weights, distinct from the brightness-estimation weights.
GRAYSCALE_WEIGHTS = (0.3, 0.59, 0.11)


def luma_coefficients(mode: str) -> LumaCoefficients:
    if mode == "standard":
        return STANDARD_LUMA
    if mode == "paper-literal":
        return PAPER_LITERAL_LUMA
    raise ValueError(f"unknown luma mode {mode!r}")


def hue_arccos(r: int, g: int, b: int) -> float:
    """Hue by the arccos formulation, verbatim.

    Kept for formula-level comparison; it deviates from the hexcone hue used
    by the sector inverse by up to ~1.12 degrees mid-sector, so the primary
    conversion path uses the hexcone form instead (the two agree exactly at
    every multiple of 60 degrees).
    """
    if r == g == b:
        return 0.0
    num = r - 0.5 * g - 0.5 * b
    den = math.sqrt(r * r + g * g + b * b - r * g - r * b - g * b)
    theta = math.degrees(math.acos(max(-1.0, min(1.0, num / den))))
    return (theta if g >= b else 360.0 - theta) % 360.0


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Single-pixel RGB [0,255] to (hue degrees [0,360), saturation, value)."""
    m = min(r, g, b)
    big = max(r, g, b)
    v = big / 255.0
    s = 0.0 if big == 0 else 1.0 - m / big
    if big == m:
        return 0.0, s, v
    span = big - m
    if big == r:
        h = 60.0 * (((g - b) / span) % 6.0)
    elif big == g:
        h = 60.0 * ((b - r) / span + 2.0)
    else:
        h = 60.0 * ((r - g) / span + 4.0)
    return h % 360.0, s, v


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    """Single-pixel HSV back to integer RGB, rounded half-up and clamped."""
    big = 255.0 * v
    m = big * (1.0 - s)
    z = (big - m) * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    sector = int(h // 60.0) % 6
    zm = z + m
    table = [(big, zm, m), (zm, big, m), (m, big, zm),
             (m, zm, big), (zm, m, big), (big, m, zm)]
    return tuple(int(min(255, max(0, math.floor(c + 0.5)))) for c in table[sector])


def rgb_to_hsv_planes(image: RasterImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized conversion of an 8-bit RGB image to float H, S, V planes."""
    if image.channels != 3:
        raise ValueError("rgb_to_hsv_planes requires a 3-channel image")
    rgb = image.data.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    m = rgb.min(axis=-1)
    big = rgb.max(axis=-1)
    v = big / 255.0
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(big > 0, 1.0 - m / np.where(big > 0, big, 1.0), 0.0)
    span = big - m
    safe = np.where(span > 0, span, 1.0)
    h = np.where(big == r, 60.0 * (((g - b) / safe) % 6.0),
                 np.where(big == g, 60.0 * ((b - r) / safe + 2.0),
                          60.0 * ((r - g) / safe + 4.0)))
    h = np.where(span == 0, 0.0, h) % 360.0
    return h, s, v


def hsv_to_rgb_planes(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> RasterImage:
    """Vectorized HSV planes back to an 8-bit RGB image."""
    big = 255.0 * v
    m = big * (1.0 - s)
    z = (big - m) * (1.0 - np.abs((h / 60.0) % 2.0 - 1.0))
    zm = z + m
    sector = (h // 60.0).astype(np.int64) % 6
    r = np.choose(sector, [big, zm, m, m, zm, big])
    g = np.choose(sector, [zm, big, big, zm, m, m])
    b = np.choose(sector, [m, m, zm, big, big, zm])
    rgb = np.stack([r, g, b], axis=-1)
    out = np.clip(round_half_up(rgb), 0, 255).astype(np.uint8)
    return RasterImage.from_array(out, depth=8)


def luma(r: float, g: float, b: float,
         coeffs: LumaCoefficients = STANDARD_LUMA) -> float:
    return coeffs.wR * r + coeffs.wG * g + coeffs.wB * b


def mean_luma_brightness(image: RasterImage,
                         coeffs: LumaCoefficients = STANDARD_LUMA) -> float:
    """Mean per-pixel luma divided by 255; the value tested against the ceiling."""
    if image.channels != 3:
        raise ValueError("mean_luma_brightness requires a 3-channel image")
    rgb = image.data.astype(np.float64)
    y = coeffs.wR * rgb[..., 0] + coeffs.wG * rgb[..., 1] + coeffs.wB * rgb[..., 2]
    return float(y.mean() / 255.0)


def to_grayscale_luminance(image: RasterImage) -> RasterImage:
    """Luminance grayscale: 0.3 R + 0.59 G + 0.11 B, rounded half-up."""
    if image.channels != 3:
        raise ValueError("to_grayscale_luminance requires a 3-channel image")
    wr, wg, wb = GRAYSCALE_WEIGHTS
    rgb = image.data.astype(np.float64)
    y = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    out = np.clip(round_half_up(y), 0, image.max_value)
    dtype = np.uint8 if image.depth == 8 else np.uint16
    return RasterImage.from_array(out.astype(dtype), depth=image.depth)
