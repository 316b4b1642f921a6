"""Binary portable pixmap I/O (P6 color, P5 grayscale, maxval 255).

Pixels map to [0,1] floats by v/255 on read; writes quantize by
round-half-away-from-zero, so read(write(x)) == quantize(x) exactly and
already-quantized images round-trip bitwise.
"""

import os

import numpy as np


class PnmError(Exception):
    pass


def _read_token(f):
    token = b""
    while True:
        ch = f.read(1)
        if not ch:
            raise PnmError("truncated header")
        if ch in b" \t\r\n":
            if token:
                return token
            continue
        if ch == b"#":
            while ch and ch != b"\n":
                ch = f.read(1)
            continue
        token += ch


def read_image(path):
    """Read a P6 (3,h,w) or P5 (1,h,w) image as float32 in [0,1]."""
    with open(path, "rb") as f:
        magic = f.read(2)
        if magic not in (b"P6", b"P5"):
            raise PnmError(f"{path}: unsupported magic {magic!r} "
                           "(only binary P6/P5 pixmaps)")
        try:
            w = int(_read_token(f))
            h = int(_read_token(f))
            maxval = int(_read_token(f))
        except ValueError as err:
            raise PnmError(f"{path}: malformed header") from err
        if maxval != 255:
            raise PnmError(f"{path}: maxval must be 255, got {maxval}")
        channels = 3 if magic == b"P6" else 1
        raw = f.read(h * w * channels)
        if len(raw) != h * w * channels:
            raise PnmError(f"{path}: truncated pixel data")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(h, w, channels)
    return (arr.transpose(2, 0, 1).astype(np.float32) / np.float32(255.0))


def write_image(image, path):
    """Write a (3,h,w) image as P6 or (1,h,w) as P5."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] not in (1, 3):
        raise PnmError(f"image must be (1|3, h, w), got shape {image.shape}")
    c, h, w = image.shape
    quantized = np.floor(np.clip(image, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    magic = b"P6" if c == 3 else b"P5"
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as f:
        f.write(magic + b"\n" + f"{w} {h}\n255\n".encode())
        f.write(quantized.transpose(1, 2, 0).tobytes())
    os.replace(tmp, path)
