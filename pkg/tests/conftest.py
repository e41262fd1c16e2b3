import numpy as np
import pytest

from docprep.evalharness import SynthDocSpec
from docprep.raster import RasterImage


PANGRAM_LINES = ("THE QUICK BROWN FOX", "JUMPS OVER 13 LAZY",
                 "DOGS. PACK MY BOX", "WITH FIVE DOZEN JUGS.")

# Calibrated once against the brute-force pixel comparator, then frozen:
# direct Otsu on the raw grayscale fails badly (splits the background) while
# the full pipeline stays near the truth mask.
GRADIENT_SPEC = SynthDocSpec(width=320, height=240, lines=PANGRAM_LINES,
                             scale=2, ink=40, gradient_direction="diagonal",
                             gradient_strength=0.5, noise_sigma=2.0,
                             blur_radius=0.6)

CLEAN_SPEC = SynthDocSpec(width=320, height=240, lines=PANGRAM_LINES, scale=2)


def random_gray(rng, height, width, low=0, high=256):
    return RasterImage.from_array(
        rng.integers(low, high, (height, width)).astype(np.uint8))


def random_rgb(rng, height, width):
    return RasterImage.from_array(
        rng.integers(0, 256, (height, width, 3)).astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
