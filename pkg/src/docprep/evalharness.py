"""OCR accuracy evaluation: external engine runner, character accuracy, reports.

The OCR engine is an external subprocess described by a command template
with literal {input}/{output} placeholder substitution (argument-vector
execution, no shell).  Accuracy is (n - errors) / n with errors the
character-level Levenshtein distance between normalized texts.

A synthetic degraded-document generator stands in for scanned corpora so the
whole suite runs hermetically; real corpora plug in through a manifest file
of `doc_id<TAB>image_path<TAB>truth_path` lines.
"""
from __future__ import annotations

import json
import math
import os
import shlex
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .font5x7 import GLYPH_HEIGHT, GLYPH_WIDTH, glyph_bitmap
from .pipeline import PipelineConfig, run_pipeline
from .raster import BinaryImage, RasterImage, decode_pnm, encode_pnm, round_half_up
from .sharpen import convolve, gaussian_kernel


class OcrError(RuntimeError):
    """Base class for external OCR engine failures."""


class OcrProcessError(OcrError):
    def __init__(self, message: str, returncode: int | None = None):
        super().__init__(message)
        self.returncode = returncode


class OcrTimeoutError(OcrError):
    pass


class OcrOutputMissingError(OcrError):
    pass


@dataclass(frozen=True)
class OcrCommand:
    command_template: str
    timeout: float = 60.0

    def __post_init__(self):
        if "{input}" not in self.command_template or "{output}" not in self.command_template:
            raise ValueError("command template must contain {input} and {output}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class AccuracyReport:
    doc_id: str
    n: int
    errors: int
    accuracy: float


@dataclass(frozen=True)
class ComparisonRow:
    doc_id: str
    n: int
    raw: AccuracyReport
    processed: AccuracyReport

    @property
    def delta(self) -> float:
        return self.processed.accuracy - self.raw.accuracy


def normalize_text(s: str) -> str:
    """Collapse whitespace runs to single spaces and trim; case is preserved."""
    return " ".join(s.split())


def edit_distance(a: str, b: str) -> int:
    """Character-level Levenshtein distance with unit costs, rolling rows."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1,        # deletion
                               current[j - 1] + 1,     # insertion
                               previous[j - 1] + cost))  # substitution
        previous = current
    return previous[-1]


def accuracy(n: int, errors: int) -> float:
    """(n - errors) / n; negative when errors exceed n, reported unclamped."""
    if n <= 0:
        raise ValueError("character count must be positive")
    if errors < 0:
        raise ValueError("error count must be nonnegative")
    return (n - errors) / n


def format_percent(value: float) -> str:
    """Percentage truncated to 2 decimals with trailing zeros stripped.

    Truncation (not half-up rounding) is what reproduces all published
    reference cells; e.g. 0.771763 -> "77.17%" and 0.839794 -> "83.97%".
    """
    cents = math.floor(value * 10000 + 1e-9)
    whole, frac = divmod(cents, 100)
    if frac == 0:
        return f"{whole}%"
    if frac % 10 == 0:
        return f"{whole}.{frac // 10}%"
    return f"{whole}.{frac:02d}%"


def run_ocr(image_path: str | os.PathLike, cmd: OcrCommand) -> str:
    """Execute the engine on one image and return its normalized text output.

    The output file is read from the substituted {output} path; engines that
    append a .txt suffix to the given base name (tesseract does) are handled.
    """
    image_path = os.fspath(image_path)
    if not os.path.exists(image_path):
        raise OcrProcessError(f"input image does not exist: {image_path}")
    with tempfile.TemporaryDirectory(prefix="docprep-ocr-") as tmp:
        out_path = os.path.join(tmp, "ocr_out")
        argv = [tok.replace("{input}", image_path).replace("{output}", out_path)
                for tok in shlex.split(cmd.command_template)]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=cmd.timeout)
        except subprocess.TimeoutExpired:
            raise OcrTimeoutError(
                f"OCR command timed out after {cmd.timeout}s: {argv[0]}") from None
        except FileNotFoundError:
            raise OcrProcessError(f"OCR command not found: {argv[0]}") from None
        if proc.returncode != 0:
            stderr = proc.stderr.decode("utf-8", "replace").strip()
            raise OcrProcessError(
                f"OCR command exited with {proc.returncode}: {stderr}",
                returncode=proc.returncode)
        for candidate in (out_path, out_path + ".txt"):
            if os.path.exists(candidate):
                with open(candidate, encoding="utf-8", errors="replace") as fh:
                    return normalize_text(fh.read())
        raise OcrOutputMissingError(f"OCR produced no output file at {out_path}")


def binary_page_image(binary: BinaryImage) -> RasterImage:
    """Render a binary page (1 = black) as an 8-bit grayscale image."""
    return RasterImage.from_array(((1 - binary.data) * 255).astype(np.uint8), depth=8)


def evaluate_document(doc_id: str, image_path: str | os.PathLike, truth_text: str,
                      cmd: OcrCommand, config: PipelineConfig = PipelineConfig()
                      ) -> ComparisonRow:
    """OCR a raw page and its pipeline-processed version against the truth."""
    truth = normalize_text(truth_text)
    if not truth:
        raise ValueError(f"{doc_id}: ground truth is empty after normalization")
    n = len(truth)
    raw_text = run_ocr(image_path, cmd)
    with open(image_path, "rb") as fh:
        image = decode_pnm(fh.read())
    stages = run_pipeline(image, config)
    with tempfile.TemporaryDirectory(prefix="docprep-eval-") as tmp:
        proc_path = os.path.join(tmp, f"{doc_id}.proc.pgm")
        with open(proc_path, "wb") as fh:
            fh.write(encode_pnm(binary_page_image(stages.binary)))
        proc_text = run_ocr(proc_path, cmd)
    raw_errors = edit_distance(raw_text, truth)
    proc_errors = edit_distance(proc_text, truth)
    return ComparisonRow(
        doc_id=doc_id, n=n,
        raw=AccuracyReport(doc_id, n, raw_errors, accuracy(n, raw_errors)),
        processed=AccuracyReport(doc_id, n, proc_errors, accuracy(n, proc_errors)))


def read_manifest(path: str | os.PathLike) -> list[tuple[str, Path, Path]]:
    """Manifest lines `doc_id<TAB>image_path<TAB>truth_path`, paths relative
    to the manifest's directory."""
    path = Path(path)
    base = path.parent
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        doc_id, image_rel, truth_rel = parts
        entries.append((doc_id, base / image_rel, base / truth_rel))
    return entries


def evaluate_manifest(manifest_path: str | os.PathLike, cmd: OcrCommand,
                      config: PipelineConfig = PipelineConfig(),
                      workers: int = 1) -> list[ComparisonRow]:
    entries = read_manifest(manifest_path)

    def one(entry):
        doc_id, image_path, truth_path = entry
        truth = truth_path.read_text(encoding="utf-8")
        return evaluate_document(doc_id, image_path, truth, cmd, config)

    if workers <= 1:
        return [one(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, entries))


def emit_report(rows: list[ComparisonRow]) -> bytes:
    """Structured JSON lines followed by an aligned plain-text table."""
    if not rows:
        raise ValueError("report needs at least one row")
    out = []
    for row in rows:
        out.append(json.dumps({
            "doc_id": row.doc_id,
            "n": row.n,
            "raw_errors": row.raw.errors,
            "raw_accuracy": round(row.raw.accuracy, 6),
            "proc_errors": row.processed.errors,
            "proc_accuracy": round(row.processed.accuracy, 6),
            "delta": round(row.delta, 6),
        }, sort_keys=False))
    out.append("")

    header = ["Document ID", "Chars", "Orig Errors", "Orig Accuracy",
              "Proc Errors", "Proc Accuracy", "Delta"]
    table = [header]
    for row in rows:
        table.append([row.doc_id, str(row.n),
                      str(row.raw.errors), format_percent(row.raw.accuracy),
                      str(row.processed.errors), format_percent(row.processed.accuracy),
                      format_percent(row.delta)])
    mean_raw = sum(r.raw.accuracy for r in rows) / len(rows)
    mean_proc = sum(r.processed.accuracy for r in rows) / len(rows)
    table.append(["MEAN", "", "", format_percent(mean_raw),
                  "", format_percent(mean_proc), format_percent(mean_proc - mean_raw)])
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    for r in table:
        out.append("  ".join(cell.ljust(width) for cell, width in zip(r, widths)).rstrip())
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Synthetic degraded-document generator


@dataclass(frozen=True)
class SynthDocSpec:
    width: int = 320
    height: int = 240
    lines: tuple[str, ...] = ("THE QUICK BROWN FOX", "JUMPS OVER 13 LAZY DOGS.")
    scale: int = 2                    # glyph stroke width in pixels
    margin: int = 10
    line_gap: int = 4                 # extra pixels between text lines
    background: int = 255
    ink: int = 40
    gradient_direction: str = "horizontal"  # horizontal | vertical | diagonal
    gradient_strength: float = 0.0          # multiplicative falloff in [0, 1)
    noise_sigma: float = 0.0
    blur_radius: float = 0.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("page dimensions must be positive")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if not 0.0 <= self.gradient_strength < 1.0:
            raise ValueError("gradient strength must keep samples in range")
        if self.gradient_direction not in ("horizontal", "vertical", "diagonal"):
            raise ValueError(f"unknown gradient direction {self.gradient_direction!r}")
        if not 0 <= self.ink < self.background <= 255:
            raise ValueError("need 0 <= ink < background <= 255")


def _gradient_field(spec: SynthDocSpec) -> np.ndarray:
    rows = np.linspace(0.0, 1.0, spec.height)[:, None]
    cols = np.linspace(0.0, 1.0, spec.width)[None, :]
    if spec.gradient_direction == "horizontal":
        ramp = np.broadcast_to(cols, (spec.height, spec.width))
    elif spec.gradient_direction == "vertical":
        ramp = np.broadcast_to(rows, (spec.height, spec.width))
    else:
        ramp = (rows + cols) / 2.0
    return 1.0 - spec.gradient_strength * ramp


def synth_document(spec: SynthDocSpec, seed: int
                   ) -> tuple[RasterImage, BinaryImage, str]:
    """Render block-glyph text, degrade it, return (RGB page, ink mask, truth)."""
    mask = np.zeros((spec.height, spec.width), dtype=bool)
    cell_w = (GLYPH_WIDTH + 1) * spec.scale
    cell_h = (GLYPH_HEIGHT + 1) * spec.scale
    y = spec.margin
    for line in spec.lines:
        if y + GLYPH_HEIGHT * spec.scale > spec.height - spec.margin:
            raise ValueError("text does not fit page vertically")
        x = spec.margin
        for char in line:
            if x + GLYPH_WIDTH * spec.scale > spec.width - spec.margin:
                raise ValueError(f"line {line!r} does not fit page horizontally")
            glyph = glyph_bitmap(char)
            block = np.kron(glyph, np.ones((spec.scale, spec.scale), dtype=bool))
            mask[y:y + block.shape[0], x:x + block.shape[1]] |= block
            x += cell_w
        y += cell_h + spec.line_gap

    page = np.where(mask, float(spec.ink), float(spec.background))
    page *= _gradient_field(spec)

    if spec.blur_radius > 0:
        size = 2 * math.ceil(3.0 * spec.blur_radius) + 1
        size = max(3, min(size, min(spec.width, spec.height) | 1))
        kernel = gaussian_kernel(spec.blur_radius, size)
        plane = RasterImage.from_array(
            np.clip(round_half_up(page), 0, 255).astype(np.uint8), depth=8)
        page = convolve(plane, kernel).data.astype(np.float64)

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        page = page + rng.normal(0.0, spec.noise_sigma, size=page.shape)

    gray = np.clip(round_half_up(page), 0, 255).astype(np.uint8)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    image = RasterImage.from_array(rgb, depth=8)
    truth_mask = BinaryImage.from_array(mask.astype(np.uint8))
    truth_text = "\n".join(spec.lines)
    return image, truth_mask, truth_text


_SYNTH_KEYS = {
    "width": int, "height": int, "scale": int, "margin": int, "line_gap": int,
    "background": int, "ink": int, "gradient_direction": str,
    "gradient_strength": float, "noise_sigma": float, "blur_radius": float,
    "text": str,
}


def load_synth_spec(data: bytes) -> SynthDocSpec:
    """Flat key=value document; `text` uses literal \\n to separate lines."""
    kwargs = {}
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected `key = value`")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SYNTH_KEYS:
            raise ValueError(f"line {lineno}: unknown synth key {key!r}")
        caster = _SYNTH_KEYS[key]
        if key == "text":
            kwargs["lines"] = tuple(raw.strip().split("\\n"))
        else:
            try:
                kwargs[key] = caster(raw.strip())
            except ValueError:
                raise ValueError(f"line {lineno}: bad value for {key}") from None
    return SynthDocSpec(**kwargs)
