import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_gray
from docprep.raster import RasterImage, round_half_up
from docprep.sharpen import (Kernel, UnsharpConfig, blur, convolve,
                             effective_kernel_size, gaussian_kernel,
                             halo_metric, unsharp_mask)


def naive_convolve(data, weights):
    """Independent reference: same tap order, explicit loops, edge clamping."""
    h, w = data.shape
    size = weights.shape[0]
    half = size // 2
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for di in range(size):
                for dj in range(size):
                    ii = min(max(i + di - half, 0), h - 1)
                    jj = min(max(j + dj - half, 0), w - 1)
                    acc += weights[di, dj] * data[ii, jj]
            out[i, j] = acc
    return np.clip(round_half_up(out), 0, 255).astype(np.uint8)


def naive_unsharp(data, config):
    smoothed = naive_convolve(
        data, gaussian_kernel(config.radius, effective_kernel_size(config)).weights)
    mask = data.astype(np.int64) - smoothed.astype(np.int64)
    sharp = round_half_up(data.astype(np.float64) + config.amount * mask)
    result = np.where(np.abs(mask) > config.threshold, sharp, data.astype(np.float64))
    return np.clip(result, 0, 255).astype(np.uint8)


# --- kernels ------------------------------------------------------------------

def test_kernel_symmetric_and_normalized():
    k = gaussian_kernel(0.5, 3)
    assert k.weights.sum() == pytest.approx(1.0)
    assert np.allclose(k.weights, k.weights.T)
    assert np.allclose(k.weights, k.weights[::-1, ::-1])
    assert k.weights[1, 1] == k.weights.max()


def test_kernel_large_radius_tends_to_box():
    k = gaussian_kernel(1000.0, 3)
    assert np.allclose(k.weights, 1.0 / 9.0, atol=1e-5)


def test_kernel_invalid():
    with pytest.raises(ValueError):
        gaussian_kernel(0.0, 3)
    with pytest.raises(ValueError):
        Kernel(size=2, weights=np.full((2, 2), 0.25))
    with pytest.raises(ValueError):
        Kernel(size=3, weights=np.ones((3, 3)))


def test_effective_kernel_size():
    assert effective_kernel_size(UnsharpConfig(radius=0.5, kernel_size=3)) == 3
    assert effective_kernel_size(UnsharpConfig(radius=1.0, kernel_size=3)) == 3
    assert effective_kernel_size(UnsharpConfig(radius=1.5, kernel_size=3)) == 11
    assert effective_kernel_size(UnsharpConfig(radius=2.12, kernel_size=3)) == 15
    assert effective_kernel_size(UnsharpConfig(radius=2.0, kernel_size=5)) == 5


def test_unsharp_config_validation():
    with pytest.raises(ValueError):
        UnsharpConfig(amount=-0.1)
    with pytest.raises(ValueError):
        UnsharpConfig(radius=0.0)
    with pytest.raises(ValueError):
        UnsharpConfig(kernel_size=4)


# --- convolution ----------------------------------------------------------------

def test_convolve_identity_kernel(rng):
    img = random_gray(rng, 9, 11)
    weights = np.zeros((3, 3))
    weights[1, 1] = 1.0
    assert convolve(img, Kernel(size=3, weights=weights)) == img


def test_convolve_constant_plane():
    img = RasterImage.from_array(np.full((8, 8), 123, dtype=np.uint8))
    assert convolve(img, gaussian_kernel(0.5, 3)) == img


def test_convolve_matches_naive_oracle(rng):
    for _ in range(3):
        img = random_gray(rng, 10, 13)
        for radius, size in [(0.5, 3), (1.2, 5)]:
            k = gaussian_kernel(radius, size)
            got = convolve(img, k).data
            want = naive_convolve(img.data, k.weights)
            assert np.array_equal(got, want)


def test_convolve_kernel_too_large():
    img = RasterImage.from_array(np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(ValueError, match="kernel"):
        convolve(img, gaussian_kernel(1.0, 5))


def test_blur_reduces_variance(rng):
    img = random_gray(rng, 20, 20)
    out = blur(img, UnsharpConfig(radius=1.0, kernel_size=5))
    assert out.data.astype(float).var() < img.data.astype(float).var()


# --- unsharp masking --------------------------------------------------------------

def test_unsharp_amount_zero_is_identity(rng):
    img = random_gray(rng, 12, 12)
    assert unsharp_mask(img, UnsharpConfig(amount=0.0)) == img


def test_unsharp_constant_plane_is_identity():
    img = RasterImage.from_array(np.full((10, 10), 60, dtype=np.uint8))
    assert unsharp_mask(img) == img


def test_unsharp_matches_naive_oracle(rng):
    img = random_gray(rng, 11, 9)
    for cfg in [UnsharpConfig(), UnsharpConfig(amount=2.0, radius=1.0, kernel_size=5),
                UnsharpConfig(threshold=10)]:
        got = unsharp_mask(img, cfg).data
        assert np.array_equal(got, naive_unsharp(img.data, cfg))


def step_edge():
    arr = np.full((8, 16), 80, dtype=np.uint8)
    arr[:, 8:] = 160
    return RasterImage.from_array(arr)


def test_unsharp_step_edge_overshoot():
    img = step_edge()
    out = unsharp_mask(img, UnsharpConfig(amount=1.5, radius=0.5))
    # the edge develops undershoot on the dark side and overshoot on the bright
    assert out.data.min() < 80
    assert out.data.max() > 160
    # far from the edge nothing moves
    assert (out.data[:, :4] == 80).all()
    assert (out.data[:, 12:] == 160).all()


def test_unsharp_amount_scales_mask():
    img = step_edge()
    smoothed = blur(img, UnsharpConfig())
    mask = img.data.astype(int) - smoothed.data.astype(int)
    one = unsharp_mask(img, UnsharpConfig(amount=1.0)).data.astype(int)
    two = unsharp_mask(img, UnsharpConfig(amount=2.0)).data.astype(int)
    inner = (np.abs(mask) > 0) & (two > 0) & (two < 255)
    assert np.array_equal((two - img.data.astype(int))[inner],
                          2 * (one - img.data.astype(int))[inner])


def test_unsharp_threshold_gates_small_masks():
    arr = np.full((8, 8), 100, dtype=np.uint8)
    arr[4, 4] = 104  # small bump: mask magnitude stays below 10
    img = RasterImage.from_array(arr)
    assert unsharp_mask(img, UnsharpConfig(threshold=10)) == img
    assert unsharp_mask(img, UnsharpConfig(threshold=0)) != img


def test_unsharp_literal_difference_mode():
    img = step_edge()
    out = unsharp_mask(img, UnsharpConfig(), literal_difference=True)
    smoothed = blur(img, UnsharpConfig())
    expected = np.clip(img.data.astype(int) - smoothed.data.astype(int), 0, 255)
    assert np.array_equal(out.data, expected.astype(np.uint8))


def test_unsharp_interior_mean_roughly_preserved(rng):
    img = random_gray(rng, 30, 30, low=60, high=196)
    out = unsharp_mask(img, UnsharpConfig(amount=1.0))
    interior = (slice(3, -3), slice(3, -3))
    before = img.data[interior].astype(float).mean()
    after = out.data[interior].astype(float).mean()
    assert abs(before - after) < 1.5


# --- halo metric --------------------------------------------------------------

def test_halo_metric_zero_when_unchanged(rng):
    img = random_gray(rng, 10, 10, low=1, high=255)
    assert halo_metric(img, img) == 0.0


def test_halo_metric_counts_new_clips():
    before = RasterImage.from_array(np.array([[10, 0, 250, 255]], dtype=np.uint8))
    after = RasterImage.from_array(np.array([[0, 0, 255, 255]], dtype=np.uint8))
    assert halo_metric(before, after) == pytest.approx(0.5)


def test_halo_grows_with_aggressive_settings():
    rng = np.random.default_rng(99)
    img = random_gray(rng, 40, 40, low=20, high=236)
    mild = unsharp_mask(img, UnsharpConfig(amount=1.5, radius=0.5))
    harsh = unsharp_mask(img, UnsharpConfig(amount=3.0, radius=2.12))
    assert halo_metric(img, harsh) > halo_metric(img, mild)


def test_halo_metric_dimension_mismatch():
    a = RasterImage.from_array(np.zeros((2, 2), dtype=np.uint8))
    b = RasterImage.from_array(np.zeros((2, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        halo_metric(a, b)
