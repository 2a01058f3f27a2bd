"""Reading PNG / binary PPM (P6) inputs and encoding PNG outputs."""

from __future__ import annotations

import io
import re

import numpy as np
from PIL import Image

from .colour_cube import as_rgb_array
from .errors import InvalidInputError

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\d+)")


def parse_ppm(data: bytes) -> np.ndarray:
    """Decode a binary P6 pixmap with maxval 255."""
    if not data.startswith(b"P6"):
        raise InvalidInputError("not a binary PPM (P6) file")
    pos = 2
    values = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if not m:
            raise InvalidInputError("truncated PPM header")
        values.append(int(m.group(1)))
        pos = m.end()
    width, height, maxval = values
    if maxval != 255:
        raise InvalidInputError(f"only 8-bit PPM is supported (maxval {maxval})")
    if pos >= len(data) or data[pos:pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise InvalidInputError("malformed PPM header")
    pos += 1
    size = width * height * 3
    raster = data[pos:pos + size]
    if len(raster) != size or width == 0 or height == 0:
        raise InvalidInputError("PPM raster is truncated or empty")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3).copy()


def encode_ppm(image) -> bytes:
    rgb = as_rgb_array(image)
    h, w = rgb.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode() + rgb.tobytes()


def decode_image(data: bytes) -> np.ndarray:
    if data.startswith(b"P6"):
        return parse_ppm(data)
    if data.startswith(PNG_MAGIC):
        with Image.open(io.BytesIO(data)) as im:
            if im.mode.startswith("I") or im.mode == "F":
                raise InvalidInputError(f"only 8-bit PNG is supported (mode {im.mode})")
            if im.mode in ("1", "LA"):
                im = im.convert("L")
            elif im.mode not in ("L", "RGB", "RGBA"):
                im = im.convert("RGB")
            return as_rgb_array(np.asarray(im))
    raise InvalidInputError("unrecognised image format (expected PNG or binary PPM)")


def read_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_png(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(image)).save(buf, format="PNG")
    return buf.getvalue()
