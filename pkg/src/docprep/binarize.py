"""Otsu global thresholding: criterion statistics, threshold search, binary maps.

The threshold search compares the between-class variance with exact integer
arithmetic (the criterion reduces to d^2 / (C1*C2) with d, C1, C2 integers up
to a constant factor), so ties resolve deterministically to the smallest t.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryImage, Histogram, RasterImage


@dataclass(frozen=True)
class OtsuStats:
    t: int
    w1: float
    w2: float
    mu1: float
    mu2: float
    var1: float
    var2: float
    sigma_w2: float
    sigma_b2: float
    sigma2: float


@dataclass(frozen=True)
class ThresholdDecision:
    threshold: int
    criterion: float
    degenerate: bool = False


def otsu_stats(hist: Histogram, t: int) -> OtsuStats:
    """Class probabilities, means, variances for the split [0..t] / (t..N)."""
    if hist.total == 0:
        raise ValueError("empty histogram")
    n = len(hist.bins)
    if not 0 <= t < n:
        raise ValueError(f"threshold index {t} out of range")
    p = hist.bins.astype(np.float64) / hist.total
    x = np.arange(n, dtype=np.float64)
    p1, x1 = p[:t + 1], x[:t + 1]
    p2, x2 = p[t + 1:], x[t + 1:]
    w1 = float(p1.sum())
    w2 = float(p2.sum())
    mu1 = float((p1 * x1).sum() / w1) if w1 > 0 else 0.0
    mu2 = float((p2 * x2).sum() / w2) if w2 > 0 else 0.0
    var1 = float((p1 * (x1 - mu1) ** 2).sum() / w1) if w1 > 0 else 0.0
    var2 = float((p2 * (x2 - mu2) ** 2).sum() / w2) if w2 > 0 else 0.0
    sigma_w2 = w1 * var1 + w2 * var2
    sigma_b2 = w1 * w2 * (mu1 - mu2) ** 2 if w1 > 0 and w2 > 0 else 0.0
    mu = float((p * x).sum())
    sigma2 = float((p * (x - mu) ** 2).sum())
    return OtsuStats(t=t, w1=w1, w2=w2, mu1=mu1, mu2=mu2, var1=var1, var2=var2,
                     sigma_w2=sigma_w2, sigma_b2=sigma_b2, sigma2=sigma2)


def otsu_threshold(hist: Histogram) -> ThresholdDecision:
    """Smallest t maximizing the between-class variance.

    Single-valued histograms are degenerate: the lone populated bin is
    returned with a zero criterion.
    """
    if hist.total == 0:
        raise ValueError("empty histogram")
    counts = [int(c) for c in hist.bins]
    populated = [i for i, c in enumerate(counts) if c]
    if len(populated) == 1:
        return ThresholdDecision(threshold=populated[0], criterion=0.0, degenerate=True)
    total = hist.total
    weighted_sum = sum(i * c for i, c in enumerate(counts))
    best_t = 0
    best_num = 0  # d^2
    best_den = 1  # C1 * C2
    c1 = s1 = 0
    for t, c in enumerate(counts):
        c1 += c
        s1 += t * c
        c2 = total - c1
        if c1 == 0 or c2 == 0:
            num, den = 0, 1
        else:
            d = s1 * total - weighted_sum * c1
            num, den = d * d, c1 * c2
        if t == 0:
            best_t, best_num, best_den = t, num, den
        elif num * best_den > best_num * den:  # strict: first max wins ties
            best_t, best_num, best_den = t, num, den
    criterion = best_num / best_den / (total * total)
    return ThresholdDecision(threshold=best_t, criterion=criterion)


def apply_threshold(plane: RasterImage, threshold: int) -> BinaryImage:
    """g = 1 where f >= threshold, 0 otherwise."""
    if plane.channels != 1:
        raise ValueError("apply_threshold requires a single-channel plane")
    return BinaryImage.from_array((plane.data >= threshold).astype(np.uint8))


def ink_mask(plane: RasterImage, hist: Histogram | None = None) -> BinaryImage:
    """Binary map of the dark Otsu class (1 = ink) of a single-channel plane.

    The dark class is the bins [0..t] of the maximizing split, so ink pixels
    satisfy f <= t.  Degenerate single-class planes yield an all-background
    (blank) map so downstream OCR sees an empty page rather than full ink.
    """
    from .raster import histogram as _histogram
    if hist is None:
        hist = _histogram(plane)
    decision = otsu_threshold(hist)
    if decision.degenerate:
        return BinaryImage.from_array(np.zeros((plane.height, plane.width), np.uint8))
    return BinaryImage.from_array((plane.data <= decision.threshold).astype(np.uint8))
