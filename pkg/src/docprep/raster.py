"""Core raster image types, bit-exact PNM/PBM codecs, histograms, depth conversion.

Images are immutable: pixel buffers are numpy arrays with the writeable flag
cleared.  Grayscale images store shape (height, width); RGB images store
shape (height, width, 3).  Indexing everywhere is (row, column).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PnmFormatError(ValueError):
    """Malformed or truncated PNM/PBM byte stream."""


_WHITESPACE = b" \t\n\r\x0b\x0c"


def round_half_up(values):
    """Round with .5 going up (toward +inf), elementwise."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


@dataclass(frozen=True, eq=False)
class RasterImage:
    width: int
    height: int
    channels: int  # 1 or 3
    depth: int     # 8 or 16
    data: np.ndarray  # (h, w) for 1 channel, (h, w, 3) for 3 channels

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.depth not in (8, 16):
            raise ValueError(f"depth must be 8 or 16, got {self.depth}")
        expected_dtype = np.uint8 if self.depth == 8 else np.uint16
        if self.data.dtype != expected_dtype:
            raise ValueError(f"dtype {self.data.dtype} does not match depth {self.depth}")
        expected_shape = (self.height, self.width) if self.channels == 1 \
            else (self.height, self.width, 3)
        if self.data.shape != expected_shape:
            raise ValueError(f"data shape {self.data.shape} != {expected_shape}")

    @property
    def max_value(self) -> int:
        return (1 << self.depth) - 1

    @classmethod
    def from_array(cls, arr: np.ndarray, depth: int | None = None) -> "RasterImage":
        arr = np.asarray(arr)
        if depth is None:
            if arr.dtype == np.uint8:
                depth = 8
            elif arr.dtype == np.uint16:
                depth = 16
            else:
                raise ValueError("depth required for non-uint8/uint16 arrays")
        dtype = np.uint8 if depth == 8 else np.uint16
        arr = np.ascontiguousarray(arr, dtype=dtype)
        arr.setflags(write=False)
        if arr.ndim == 2:
            channels = 1
        elif arr.ndim == 3 and arr.shape[2] == 3:
            channels = 3
        else:
            raise ValueError(f"unsupported array shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], channels=channels,
                   depth=depth, data=arr)

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and self.channels == other.channels and self.depth == other.depth
                and np.array_equal(self.data, other.data))


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """One bit per pixel, stored one byte per pixel with values 0 or 1.

    Sample 1 renders as black in the PBM codec (PBM convention).
    """
    width: int
    height: int
    data: np.ndarray  # (h, w) uint8 of {0, 1}

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.data.shape != (self.height, self.width) or self.data.dtype != np.uint8:
            raise ValueError("data must be uint8 of shape (height, width)")
        if self.data.max(initial=0) > 1:
            raise ValueError("binary samples must be 0 or 1")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BinaryImage":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.data, other.data))


@dataclass(frozen=True, eq=False)
class Histogram:
    bins: np.ndarray  # int64 counts
    total: int

    def __post_init__(self):
        if int(self.bins.sum()) != self.total:
            raise ValueError("histogram total does not match bin counts")

    @classmethod
    def from_counts(cls, counts) -> "Histogram":
        counts = np.ascontiguousarray(counts, dtype=np.int64)
        counts.setflags(write=False)
        return cls(bins=counts, total=int(counts.sum()))

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.bins, other.bins)


# ---------------------------------------------------------------------------
# PNM (P5/P6) codec


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        c = buf[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#'
            nl = buf.find(b"\n", pos)
            if nl < 0:
                raise PnmFormatError("unterminated header comment")
            pos = nl + 1
        else:
            break
    start = pos
    while pos < n and buf[pos] not in _WHITESPACE and buf[pos] != 0x23:
        pos += 1
    if start == pos:
        raise PnmFormatError("truncated PNM header")
    return buf[start:pos], pos


def _header_int(buf: bytes, pos: int, what: str) -> tuple[int, int]:
    tok, pos = _next_token(buf, pos)
    try:
        value = int(tok)
    except ValueError:
        raise PnmFormatError(f"non-numeric {what} in PNM header: {tok!r}") from None
    return value, pos


def decode_pnm(buf: bytes) -> RasterImage:
    """Decode binary PGM (P5) or PPM (P6) bytes; strict header parsing."""
    magic = buf[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmFormatError(f"unsupported PNM magic {magic!r}")
    pos = 2
    width, pos = _header_int(buf, pos, "width")
    height, pos = _header_int(buf, pos, "height")
    maxval, pos = _header_int(buf, pos, "maxval")
    if width <= 0 or height <= 0:
        raise PnmFormatError("zero or negative image dimensions")
    if maxval not in (255, 65535):
        raise PnmFormatError(f"unsupported maxval {maxval}")
    if pos >= len(buf) or buf[pos] not in _WHITESPACE:
        raise PnmFormatError("missing whitespace before PNM body")
    body = buf[pos + 1:]
    depth = 8 if maxval == 255 else 16
    sample_bytes = 1 if depth == 8 else 2
    expected = width * height * channels * sample_bytes
    if len(body) < expected:
        raise PnmFormatError(f"truncated PNM body: {len(body)} < {expected} bytes")
    if len(body) > expected:
        raise PnmFormatError(f"trailing bytes after PNM body: {len(body)} > {expected}")
    dtype = np.uint8 if depth == 8 else np.dtype(">u2")
    samples = np.frombuffer(body, dtype=dtype).astype(np.uint8 if depth == 8 else np.uint16)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return RasterImage.from_array(samples.reshape(shape), depth=depth)


def encode_pnm(image: RasterImage) -> bytes:
    """Canonical encoding: magic, newline, "w h", newline, maxval, newline, body.

    16-bit samples are big-endian per the PNM convention.
    """
    magic = b"P5" if image.channels == 1 else b"P6"
    header = b"%s\n%d %d\n%d\n" % (magic, image.width, image.height, image.max_value)
    if image.depth == 8:
        body = image.data.tobytes()
    else:
        body = image.data.astype(">u2").tobytes()
    return header + body


# ---------------------------------------------------------------------------
# PBM (P4) codec for binary images; bit 1 = black.


def encode_pbm(image: BinaryImage) -> bytes:
    header = b"P4\n%d %d\n" % (image.width, image.height)
    packed = np.packbits(image.data, axis=1)
    return header + packed.tobytes()


def decode_pbm(buf: bytes) -> BinaryImage:
    if buf[:2] != b"P4":
        raise PnmFormatError(f"unsupported PBM magic {buf[:2]!r}")
    pos = 2
    width, pos = _header_int(buf, pos, "width")
    height, pos = _header_int(buf, pos, "height")
    if width <= 0 or height <= 0:
        raise PnmFormatError("zero or negative image dimensions")
    if pos >= len(buf) or buf[pos] not in _WHITESPACE:
        raise PnmFormatError("missing whitespace before PBM body")
    body = buf[pos + 1:]
    row_bytes = (width + 7) // 8
    expected = row_bytes * height
    if len(body) != expected:
        raise PnmFormatError(f"PBM body is {len(body)} bytes, expected {expected}")
    rows = np.frombuffer(body, dtype=np.uint8).reshape(height, row_bytes)
    bits = np.unpackbits(rows, axis=1)[:, :width]
    return BinaryImage.from_array(bits)


# ---------------------------------------------------------------------------


def histogram(image: RasterImage, region: tuple[int, int, int, int] | None = None) -> Histogram:
    """Intensity histogram of a single-channel image.

    region is (top, left, height, width); whole image when omitted.
    """
    if image.channels != 1:
        raise ValueError("histogram requires a single-channel image")
    data = image.data
    if region is not None:
        top, left, rh, rw = region
        if top < 0 or left < 0 or rh <= 0 or rw <= 0 \
                or top + rh > image.height or left + rw > image.width:
            raise ValueError(f"region {region} out of bounds for "
                             f"{image.width}x{image.height} image")
        data = data[top:top + rh, left:left + rw]
    counts = np.bincount(data.ravel(), minlength=image.max_value + 1)
    return Histogram.from_counts(counts)


def convert_depth(image: RasterImage, target_depth: int) -> RasterImage:
    """Widen 8->16 by x257 (255 -> 65535 exactly); narrow 16->8 by /257 half-up."""
    if target_depth not in (8, 16):
        raise ValueError(f"target depth must be 8 or 16, got {target_depth}")
    if target_depth == image.depth:
        return image
    if target_depth == 16:
        widened = image.data.astype(np.uint16) * 257
        return RasterImage.from_array(widened, depth=16)
    narrowed = round_half_up(image.data.astype(np.float64) / 257.0).astype(np.uint8)
    return RasterImage.from_array(narrowed, depth=8)
