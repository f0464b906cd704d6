"""RGB raster type, PPM (P6/P3) file I/O and per-channel histograms."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

CHANNELS = ("R", "G", "B")


class PpmError(ValueError):
    """Malformed PPM data; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True, eq=False)
class ImageRGB:
    """Immutable 8-bit RGB image.

    ``pixels`` has shape ``(height, width, 3)``; pixel ``(u, v)`` is
    ``pixels[v, u]``, i.e. flat index ``v * width + u`` in row-major order.
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        arr = np.asarray(self.pixels)
        if arr.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel array shape {arr.shape} does not match {self.height}x{self.width}x3"
            )
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255):
                raise ValueError("channel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        if arr is self.pixels:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_array(cls, arr) -> ImageRGB:
        arr = np.asarray(arr)
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr)

    @classmethod
    def filled(cls, width: int, height: int, rgb=(0, 0, 0)) -> ImageRGB:
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[...] = rgb
        return cls(width, height, arr)

    def pixel(self, u: int, v: int) -> tuple[int, int, int]:
        r, g, b = self.pixels[v, u]
        return int(r), int(g), int(b)

    def __eq__(self, other):
        if not isinstance(other, ImageRGB):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.pixels.tobytes()))

    def __repr__(self):
        return f"ImageRGB({self.width}x{self.height})"


@dataclass(frozen=True)
class Histogram:
    channel: str
    bins: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.bins)


# --- PPM -------------------------------------------------------------------

_WHITESPACE = b" \t\n\r\v\f"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    """Return (token, token_start, position after token), skipping whitespace and comments."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c[0] in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PpmError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    return data[start:pos], start, pos


def _header_int(data: bytes, pos: int, what: str) -> tuple[int, int, int]:
    """Return (value, token_start, position after token)."""
    tok, start, pos = _next_token(data, pos)
    if not tok.isdigit():
        raise PpmError(f"expected {what}, got {tok[:16]!r}", start)
    return int(tok), start, pos


def read_ppm(data: bytes) -> ImageRGB:
    """Decode a P6 (binary) or P3 (ASCII) PPM with maxval 255."""
    if len(data) < 2:
        raise PpmError("file too short for a PPM magic number", 0)
    magic = data[:2]
    if magic not in (b"P6", b"P3"):
        raise PpmError(f"unsupported magic {magic!r}", 0)
    pos = 2
    width, width_start, pos = _header_int(data, pos, "width")
    height, height_start, pos = _header_int(data, pos, "height")
    if width <= 0 or height <= 0:
        raise PpmError(
            f"dimensions must be positive, got {width}x{height}",
            width_start if width <= 0 else height_start,
        )
    maxval, maxval_start, pos = _header_int(data, pos, "maxval")
    if maxval != 255:
        raise PpmError(f"maxval must be 255, got {maxval}", maxval_start)
    count = width * height * 3

    if magic == b"P6":
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise PpmError("missing whitespace after maxval", pos)
        pos += 1
        raw = data[pos : pos + count]
        if len(raw) < count:
            raise PpmError(f"truncated pixel data: need {count} bytes, got {len(raw)}", pos + len(raw))
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
        return ImageRGB(width, height, arr.copy())

    values = []
    for _ in range(count):
        try:
            tok, start, pos = _next_token(data, pos)
        except PpmError as exc:
            raise PpmError(
                f"truncated pixel data: need {count} samples, got {len(values)}", exc.offset
            ) from None
        if not tok.isdigit() or int(tok) > 255:
            raise PpmError(f"invalid sample {tok[:16]!r}", start)
        values.append(int(tok))
    arr = np.array(values, dtype=np.uint8).reshape(height, width, 3)
    return ImageRGB(width, height, arr)


def write_ppm(img: ImageRGB, format: str = "P6") -> bytes:
    fmt = format.upper()
    header = f"{fmt}\n{img.width} {img.height}\n255\n".encode("ascii")
    if fmt == "P6":
        return header + img.pixels.tobytes()
    if fmt == "P3":
        flat = img.pixels.reshape(-1, 3)
        body = "".join(f"{r} {g} {b}\n" for r, g, b in flat.tolist())
        return header + body.encode("ascii")
    raise ValueError(f"unknown PPM format {format!r}; use 'P6' or 'P3'")


def load_ppm(path) -> ImageRGB:
    return read_ppm(Path(path).read_bytes())


def save_ppm(img: ImageRGB, path, format: str = "P6") -> None:
    Path(path).write_bytes(write_ppm(img, format))


# --- pixel statistics -------------------------------------------------------

def histogram(img: ImageRGB, channel: str) -> Histogram:
    idx = CHANNELS.index(channel.upper())
    counts = np.bincount(img.pixels[:, :, idx].ravel(), minlength=256)
    return Histogram(CHANNELS[idx], tuple(int(c) for c in counts))


def round_half_away(x):
    """Round half away from zero (numpy's ``round`` is half-to-even)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def scale_illumination(img: ImageRGB, factor: float) -> ImageRGB:
    """Multiply every channel by ``factor``, rounding half away from zero and clamping to 255."""
    if not factor > 0:
        raise ValueError(f"illumination factor must be positive, got {factor}")
    if factor == 1.0:
        return img
    scaled = round_half_away(img.pixels.astype(np.float64) * factor)
    return ImageRGB(img.width, img.height, np.clip(scaled, 0, 255).astype(np.uint8))
