"""Minimal binary PGM (P5) / PPM (P6) reader and writer, maxval 255.

Gray rasters are read from P5, color rasters from P6. Binary rasters are
written as P5 with foreground = 255 and background = 0.
"""

import numpy as np

from .exceptions import FormatError
from .validation import check_binary_image, check_color_image, check_gray_image


def _read_tokens(data, count):
    """Pull `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the first pixel byte (one whitespace
    character after the last token).
    """
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise FormatError("truncated netpbm header")
        tokens.append(data[start:i])
    if i >= n or not data[i:i + 1].isspace():
        raise FormatError("missing whitespace after netpbm header")
    return tokens, i + 1


def _read_netpbm(path, magic, channels):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not data.startswith(magic):
        raise FormatError(f"{path}: expected {magic.decode()} header")
    try:
        tokens, offset = _read_tokens(data, 4)
        width, height, maxval = (int(t) for t in tokens[1:4])
    except (FormatError, ValueError) as exc:
        raise FormatError(f"{path}: malformed header") from exc
    if tokens[0] != magic:
        raise FormatError(f"{path}: expected {magic.decode()} header")
    if width <= 0 or height <= 0:
        raise FormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    expected = width * height * channels
    pixels = data[offset:offset + expected]
    if len(pixels) != expected:
        raise FormatError(f"{path}: expected {expected} pixel bytes, got {len(pixels)}")
    arr = np.frombuffer(pixels, dtype=np.uint8)
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, channels)


def read_ppm(path):
    """Read a binary PPM (P6) file into a ColorImage."""
    return _read_netpbm(path, b"P6", 3)


def read_pgm(path):
    """Read a binary PGM (P5) file into a GrayImage."""
    return _read_netpbm(path, b"P5", 1).astype(np.float64)


def write_ppm(path, img):
    img = check_color_image(img, min_size=1)
    header = f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(img).tobytes())


def write_pgm(path, img):
    """Write a BinaryImage as P5 with foreground=255, background=0."""
    img = check_binary_image(img)
    raster = np.where(img, np.uint8(255), np.uint8(0))
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(raster).tobytes())
