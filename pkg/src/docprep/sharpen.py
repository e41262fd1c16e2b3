"""Gaussian blur and unsharp masking with amount/radius/threshold parameters.

The sharpening operator is the classical one: J = I + amount * (I - blur(I)),
applied only where the absolute mask value exceeds the threshold.  A literal
mode returning the raw difference mask is kept for debugging.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import RasterImage, round_half_up


@dataclass(frozen=True)
class UnsharpConfig:
    amount: float = 1.5
    radius: float = 0.5
    threshold: int = 0
    kernel_size: int = 3

    def __post_init__(self):
        if self.amount < 0:
            raise ValueError("amount must be >= 0")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd and >= 3")


@dataclass(frozen=True, eq=False)
class Kernel:
    size: int
    weights: np.ndarray  # size x size, sums to 1

    def __post_init__(self):
        if self.size % 2 == 0 or self.size < 1:
            raise ValueError("kernel size must be odd and positive")
        if self.weights.shape != (self.size, self.size):
            raise ValueError("weights shape does not match size")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError("kernel weights must sum to 1")


def gaussian_kernel(radius: float, size: int) -> Kernel:
    """Normalized isotropic Gaussian: w(di, dj) ~ exp(-(di^2+dj^2)/(2 radius^2))."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    half = size // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    d2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    weights = np.exp(-d2 / (2.0 * radius * radius))
    weights /= weights.sum()
    return Kernel(size=size, weights=weights)


def effective_kernel_size(config: UnsharpConfig) -> int:
    """Configured size when it covers the radius; otherwise grow to 2*ceil(3r)+1."""
    if config.radius <= (config.kernel_size - 1) / 2:
        return config.kernel_size
    return 2 * math.ceil(3.0 * config.radius) + 1


def convolve(plane: RasterImage, kernel: Kernel) -> RasterImage:
    """Spatial convolution with clamp-to-edge borders, rounded half-up."""
    if plane.channels != 1:
        raise ValueError("convolve requires a single-channel plane")
    if kernel.size > plane.height or kernel.size > plane.width:
        raise ValueError("kernel larger than image")
    half = kernel.size // 2
    padded = np.pad(plane.data.astype(np.float64), half, mode="edge")
    h, w = plane.height, plane.width
    acc = np.zeros((h, w), dtype=np.float64)
    for di in range(kernel.size):
        for dj in range(kernel.size):
            acc += kernel.weights[di, dj] * padded[di:di + h, dj:dj + w]
    out = np.clip(round_half_up(acc), 0, plane.max_value)
    dtype = np.uint8 if plane.depth == 8 else np.uint16
    return RasterImage.from_array(out.astype(dtype), depth=plane.depth)


def blur(plane: RasterImage, config: UnsharpConfig) -> RasterImage:
    return convolve(plane, gaussian_kernel(config.radius, effective_kernel_size(config)))


def unsharp_mask(plane: RasterImage, config: UnsharpConfig = UnsharpConfig(),
                 literal_difference: bool = False) -> RasterImage:
    """Sharpen one plane; literal_difference returns clamp(I - blur(I)) instead."""
    if plane.channels != 1:
        raise ValueError("unsharp_mask requires a single-channel plane")
    smoothed = blur(plane, config)
    original = plane.data.astype(np.int64)
    mask = original - smoothed.data.astype(np.int64)
    dtype = np.uint8 if plane.depth == 8 else np.uint16
    if literal_difference:
        out = np.clip(mask, 0, plane.max_value).astype(dtype)
        return RasterImage.from_array(out, depth=plane.depth)
    sharpened = round_half_up(original + config.amount * mask)
    result = np.where(np.abs(mask) > config.threshold, sharpened,
                      original.astype(np.float64))
    out = np.clip(result, 0, plane.max_value).astype(dtype)
    return RasterImage.from_array(out, depth=plane.depth)


def halo_metric(before: RasterImage, after: RasterImage) -> float:
    """Fraction of pixels the sharpener drove into clipping at 0 or full scale."""
    if (before.width, before.height) != (after.width, after.height):
        raise ValueError("image dimensions differ")
    maxval = before.max_value
    b = before.data
    a = after.data
    clipped = ((a == 0) & (b != 0)) | ((a == maxval) & (b != maxval))
    return float(clipped.mean())
