"""Grayscale image reading and writing.

Rasters are 8-bit grayscale, background 0 and stroke 255, stored as PNG or
binary PGM (P5). Arrays are uint8 with shape (height, width).
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError


def read_image(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"image not found: {path}")
    if path.suffix.lower() == ".pgm":
        return _read_pgm(path)
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except Exception as exc:
        raise DataError(f"corrupt image {path}: {exc}") from exc


def write_image(path: str | Path, arr: np.ndarray) -> None:
    path = Path(path)
    arr = np.asarray(arr, dtype=np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".pgm":
        _write_pgm(path, arr)
    else:
        Image.fromarray(arr, mode="L").save(path, format="PNG")


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    try:
        # Header tokens may be separated by whitespace and '#' comments.
        tokens: list[bytes] = []
        pos = 0
        while len(tokens) < 4:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
                continue
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
        if tokens[0] != b"P5":
            raise ValueError(f"unsupported PGM magic {tokens[0]!r}")
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        if maxval != 255:
            raise ValueError(f"unsupported maxval {maxval}")
        pos += 1  # single whitespace after maxval
        pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
        return pixels.reshape(h, w).copy()
    except (ValueError, IndexError) as exc:
        raise DataError(f"corrupt image {path}: {exc}") from exc


def _write_pgm(path: Path, arr: np.ndarray) -> None:
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def binarize(arr: np.ndarray, threshold: int = 127) -> np.ndarray:
    """Boolean foreground mask: pixel value above threshold."""
    return np.asarray(arr) > threshold


def mask_to_u8(mask: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)


def png_bytes(arr: np.ndarray, mode: str = "L") -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode=mode).save(buf, format="PNG")
    return buf.getvalue()
