"""End-to-end enhancement pipeline and the flat key=value config format.

Stage order: brightness equalization (CLAHE on V), brightness estimation +
gain/bias adjustment, luminance grayscale, unsharp masking, Otsu
binarization.  Each stage boundary is an 8-bit image, so stage artifacts can
be saved and replayed individually with bit-identical results.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from . import binarize, enhance, sharpen
from .colorspace import luma_coefficients, mean_luma_brightness, to_grayscale_luminance
from .enhance import ClaheConfig, GainBias
from .raster import BinaryImage, RasterImage, histogram
from .sharpen import UnsharpConfig

log = logging.getLogger(__name__)

POLARITIES = ("text-black", "text-white")


class ConfigError(ValueError):
    """Bad pipeline configuration document or override."""


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"pipeline stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    clahe: ClaheConfig = field(default_factory=ClaheConfig)
    gain_bias: GainBias | None = None  # None = automatic search
    ceiling: float = 0.93              # brightness ceiling for the auto search
    luma_mode: str = "standard"
    unsharp: UnsharpConfig = field(default_factory=UnsharpConfig)
    binarize_polarity: str = "text-black"
    save_stages: bool = False
    working_depth: int = 16

    def __post_init__(self):
        if self.luma_mode not in ("standard", "paper-literal"):
            raise ConfigError(f"luma_mode: unknown mode {self.luma_mode!r}")
        if self.binarize_polarity not in POLARITIES:
            raise ConfigError(f"binarize_polarity: must be one of {POLARITIES}")
        if self.working_depth not in (8, 16):
            raise ConfigError("working_depth: must be 8 or 16")


@dataclass(frozen=True)
class StageOutputs:
    equalized: RasterImage | None
    adjusted: RasterImage | None
    grayscale: RasterImage
    sharpened: RasterImage
    binary: BinaryImage
    chosen_gain_bias: GainBias
    brightness_before: float
    brightness_after: float
    threshold: int


def _stage(name: str):
    def wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - stage identity must be attached
            raise PipelineStageError(name, exc) from exc
    return wrap


def binarize_plane(plane: RasterImage, polarity: str = "text-black") -> tuple[BinaryImage, int]:
    """Otsu-binarize one grayscale plane; sample 1 renders black in PBM output.

    Ink pixels are the dark Otsu class (value <= chosen split).  For
    text-black output ink is black (1); for text-white the page is inverted.
    """
    hist = histogram(plane)
    decision = binarize.otsu_threshold(hist)
    if decision.degenerate:
        ink = np.zeros((plane.height, plane.width), dtype=np.uint8)
    else:
        ink = (plane.data <= decision.threshold).astype(np.uint8)
    data = ink if polarity == "text-black" else (1 - ink).astype(np.uint8)
    return BinaryImage.from_array(data), decision.threshold


def run_pipeline(image: RasterImage, config: PipelineConfig = PipelineConfig()) -> StageOutputs:
    if image.depth != 8:
        raise ValueError("pipeline input must be 8-bit")
    coeffs = luma_coefficients(config.luma_mode)

    if image.channels == 3:
        equalized = _stage("equalize")(enhance.equalize_brightness, image,
                                       config.clahe, config.working_depth)
        brightness_before = mean_luma_brightness(equalized, coeffs)
        if config.gain_bias is None:
            gb = _stage("estimate")(enhance.auto_gain_bias, equalized,
                                    config.ceiling, coeffs)
        else:
            gb = config.gain_bias
        adjusted = _stage("adjust")(enhance.adjust_gain_bias, equalized, gb)
        brightness_after = mean_luma_brightness(adjusted, coeffs)
        gray = _stage("grayscale")(to_grayscale_luminance, adjusted)
    else:
        log.warning("grayscale input: skipping equalization and gain/bias stages")
        equalized = adjusted = None
        gb = GainBias(gain=1.0, bias=0.0)
        brightness_before = brightness_after = float(image.data.mean() / image.max_value)
        gray = image

    sharpened = _stage("sharpen")(sharpen.unsharp_mask, gray, config.unsharp)
    binary, threshold = _stage("binarize")(binarize_plane, sharpened,
                                           config.binarize_polarity)
    return StageOutputs(equalized=equalized, adjusted=adjusted, grayscale=gray,
                        sharpened=sharpened, binary=binary, chosen_gain_bias=gb,
                        brightness_before=brightness_before,
                        brightness_after=brightness_after, threshold=threshold)


# ---------------------------------------------------------------------------
# Flat key=value configuration


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int(raw: str) -> int:
    return int(raw.strip())


def _parse_float(raw: str) -> float:
    return float(raw.strip())


def _parse_str(raw: str) -> str:
    return raw.strip()


# key -> (parser, validator description, validator)
_CONFIG_KEYS = {
    "clahe.tiles_x": (_parse_int, ">= 1", lambda v: v >= 1),
    "clahe.tiles_y": (_parse_int, ">= 1", lambda v: v >= 1),
    "clahe.clip_factor": (_parse_float, "in [0, 100]", lambda v: 0 <= v <= 100),
    "clahe.gray_levels": (_parse_int, ">= 2", lambda v: v >= 2),
    "clahe.slope_max": (_parse_float, "> 1", lambda v: v > 1),
    "clahe.clip_limit_override": (_parse_float, "> 0", lambda v: v > 0),
    "gain_bias.mode": (_parse_str, "auto or fixed", lambda v: v in ("auto", "fixed")),
    "gain_bias.gain": (_parse_float, "> 0", lambda v: v > 0),
    "gain_bias.bias": (_parse_float, "any", lambda v: True),
    "gain_bias.ceiling": (_parse_float, "in (0, 1]", lambda v: 0 < v <= 1),
    "luma_mode": (_parse_str, "standard or paper-literal",
                  lambda v: v in ("standard", "paper-literal")),
    "unsharp.amount": (_parse_float, ">= 0", lambda v: v >= 0),
    "unsharp.radius": (_parse_float, "> 0", lambda v: v > 0),
    "unsharp.threshold": (_parse_int, ">= 0", lambda v: v >= 0),
    "unsharp.kernel_size": (_parse_int, "odd, >= 3", lambda v: v >= 3 and v % 2 == 1),
    "binarize_polarity": (_parse_str, "text-black or text-white",
                          lambda v: v in POLARITIES),
    "save_stages": (_parse_bool, "boolean", lambda v: True),
    "working_depth": (_parse_int, "8 or 16", lambda v: v in (8, 16)),
}

PAPER_DEFAULTS = {
    "gain_bias.mode": "auto",
    "gain_bias.gain": 1.4,
    "gain_bias.bias": 50.0,
    "gain_bias.ceiling": 0.93,
}


def parse_config_entry(key: str, raw_value: str):
    """Parse and range-check one key=value pair; raises ConfigError."""
    if key not in _CONFIG_KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    parser, expectation, check = _CONFIG_KEYS[key]
    try:
        value = parser(raw_value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw_value!r}") from None
    if not check(value):
        raise ConfigError(f"{key}: value {value!r} out of range (expected {expectation})")
    return value


def parse_config_text(text: str) -> dict:
    """Flat `key = value` lines into a validated key/value dict."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        try:
            values[key] = parse_config_entry(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return values


def build_pipeline_config(values: dict) -> PipelineConfig:
    """Assemble a PipelineConfig from a validated flat-key dict."""
    merged = dict(PAPER_DEFAULTS)
    merged.update(values)

    clahe_kwargs = {}
    for name in ("tiles_x", "tiles_y", "clip_factor", "gray_levels",
                 "slope_max", "clip_limit_override"):
        key = f"clahe.{name}"
        if key in merged:
            clahe_kwargs[name] = merged[key]
    unsharp_kwargs = {}
    for name in ("amount", "radius", "threshold", "kernel_size"):
        key = f"unsharp.{name}"
        if key in merged:
            unsharp_kwargs[name] = merged[key]

    if merged["gain_bias.mode"] == "auto":
        gain_bias = None
    else:
        gain_bias = GainBias(gain=merged["gain_bias.gain"],
                             bias=merged["gain_bias.bias"],
                             ceiling=merged["gain_bias.ceiling"])
    try:
        return PipelineConfig(
            clahe=ClaheConfig(**clahe_kwargs),
            gain_bias=gain_bias,
            ceiling=merged["gain_bias.ceiling"],
            luma_mode=merged.get("luma_mode", "standard"),
            unsharp=UnsharpConfig(**unsharp_kwargs),
            binarize_polarity=merged.get("binarize_polarity", "text-black"),
            save_stages=merged.get("save_stages", False),
            working_depth=merged.get("working_depth", 16),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(data: bytes) -> PipelineConfig:
    """Parse a config document; omitted keys take the working defaults."""
    return build_pipeline_config(parse_config_text(data.decode("utf-8")))
