"""8-bit image files: PNG via Pillow, binary PPM/PGM natively.

Floats are quantized with round(v * 255) only at the file boundary; decoding
maps back with v / 255, so decode(encode(x)) is idempotent on 8-bit data.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionError
from .tensors import as_image, clamp01

FORMATS = ("png", "ppm")


def quantize(x) -> np.ndarray:
    """Clamp to [0, 1] and round to uint8."""
    x = clamp01(as_image(x))
    return np.rint(x * 255.0).astype(np.uint8)


def dequantize(raw: np.ndarray) -> np.ndarray:
    x = np.asarray(raw, dtype=np.float64) / 255.0
    if x.ndim == 2:
        x = x[:, :, None]
    return x


def _encode_pnm(q: np.ndarray) -> bytes:
    height, width, channels = q.shape
    if channels == 1:
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        return header + q[:, :, 0].tobytes()
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + q.tobytes()


def _decode_pnm(data: bytes) -> np.ndarray:
    # Binary PGM (P5) / PPM (P6). Header tokens may be separated by any
    # whitespace and interleaved with '#' comments.
    if data[:2] not in (b"P5", b"P6"):
        raise DimensionError("not a binary PGM/PPM payload")
    channels = 1 if data[:2] == b"P5" else 3
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = tokens
    if maxval != 255:
        raise DimensionError(f"only 8-bit PNM supported, got maxval {maxval}")
    raw = np.frombuffer(data, dtype=np.uint8, count=height * width * channels, offset=pos)
    return raw.reshape(height, width, channels)


def encode_image(x, image_format: str = "png") -> bytes:
    """Serialize a float image to PNG or binary PPM/PGM bytes."""
    q = quantize(x)
    if image_format == "ppm":
        return _encode_pnm(q)
    if image_format != "png":
        raise DimensionError(f"unsupported image format {image_format!r}")
    pil = Image.fromarray(q[:, :, 0] if q.shape[2] == 1 else q)
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def decode_image(data: bytes) -> np.ndarray:
    """Parse PNG or binary PPM/PGM bytes into a float (H, W, C) image."""
    if data[:2] in (b"P5", b"P6"):
        return dequantize(_decode_pnm(data))
    with Image.open(io.BytesIO(data)) as pil:
        if pil.mode not in ("L", "RGB"):
            pil = pil.convert("RGB" if pil.mode not in ("1", "I", "F") else "L")
        arr = np.asarray(pil, dtype=np.uint8)
    return dequantize(arr)


def write_image(path: str | Path, x, image_format: str | None = None) -> Path:
    """Write a float image; the format defaults to the path suffix."""
    path = Path(path)
    if image_format is None:
        image_format = "ppm" if path.suffix.lower() in (".ppm", ".pgm") else "png"
    path.write_bytes(encode_image(x, image_format))
    return path


def read_image(path: str | Path) -> np.ndarray:
    return decode_image(Path(path).read_bytes())


def read_mask(path: str | Path) -> np.ndarray:
    """Read a grayscale mask file into an (H, W) float map in [0, 1]."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P5", b"P6"):
        arr = _decode_pnm(data)
        if arr.shape[2] != 1:
            arr = arr.mean(axis=2, keepdims=True).astype(np.uint8)
        return dequantize(arr)[:, :, 0]
    with Image.open(io.BytesIO(data)) as pil:
        arr = np.asarray(pil.convert("L"), dtype=np.uint8)
    return dequantize(arr)[:, :, 0]


def output_extension(image_format: str, channels: int) -> str:
    if image_format == "ppm":
        return ".pgm" if channels == 1 else ".ppm"
    return ".png"
