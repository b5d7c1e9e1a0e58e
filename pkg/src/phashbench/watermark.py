"""The watermark stamp: a geometric logo, a caption and a URL on one opaque tile.

The stamp is drawn from primitives and a built-in 5x7 font rather than a
system font, so every install produces the same pixels. ``STAMP_SHA256``
pins those pixels; ``watermark_asset`` refuses to return anything else.
"""
from __future__ import annotations

import hashlib
from functools import lru_cache

import numpy as np

from .imageio import RasterImage

CAPTION = "SAMPLE WATERMARK"
URL = "WWW.EXAMPLE.ORG"
STAMP_VERSION = 1
STAMP_SHA256 = "c46a7c28ac71640719bca8fabcded9cde6ddafc31c592281d14dc0e09e174143"

_FONT = {
    "A": ["01110", "10001", "10001", "11111", "10001", "10001", "10001"],
    "E": ["11111", "10000", "10000", "11110", "10000", "10000", "11111"],
    "G": ["01110", "10001", "10000", "10111", "10001", "10001", "01111"],
    "K": ["10001", "10010", "10100", "11000", "10100", "10010", "10001"],
    "L": ["10000", "10000", "10000", "10000", "10000", "10000", "11111"],
    "M": ["10001", "11011", "10101", "10101", "10001", "10001", "10001"],
    "O": ["01110", "10001", "10001", "10001", "10001", "10001", "01110"],
    "P": ["11110", "10001", "10001", "11110", "10000", "10000", "10000"],
    "R": ["11110", "10001", "10001", "11110", "10100", "10010", "10001"],
    "S": ["01111", "10000", "10000", "01110", "00001", "00001", "11110"],
    "T": ["11111", "00100", "00100", "00100", "00100", "00100", "00100"],
    "W": ["10001", "10001", "10001", "10101", "10101", "11011", "10001"],
    "X": ["10001", "10001", "01010", "00100", "01010", "10001", "10001"],
    ".": ["00000", "00000", "00000", "00000", "00000", "01100", "01100"],
    " ": ["00000"] * 7,
}

_HEIGHT = 64
_SCALE = 2
_ADVANCE = 6 * _SCALE
_BACKGROUND = (40, 40, 48)


def _draw_text(canvas: np.ndarray, text: str, x: int, y: int, colour) -> None:
    for k, ch in enumerate(text):
        glyph = np.array([[c == "1" for c in row] for row in _FONT[ch]])
        mask = np.kron(glyph, np.ones((_SCALE, _SCALE), dtype=bool))
        x0 = x + k * _ADVANCE
        region = canvas[y:y + mask.shape[0], x0:x0 + mask.shape[1]]
        region[mask] = colour


def _draw_logo(canvas: np.ndarray) -> None:
    yy, xx = np.mgrid[0:_HEIGHT, 0:_HEIGHT] + 0.5
    c = _HEIGHT / 2
    disc = (xx - c) ** 2 + (yy - c) ** 2 <= (0.42 * _HEIGHT) ** 2
    canvas[:, :_HEIGHT][disc] = (230, 120, 30)
    # upward triangle inside the disc
    tri = (yy >= 0.28 * _HEIGHT) & (yy <= 0.70 * _HEIGHT) & (
        np.abs(xx - c) <= (yy - 0.28 * _HEIGHT) * 0.6
    )
    canvas[:, :_HEIGHT][tri] = (250, 250, 250)


def _render() -> np.ndarray:
    text_w = max(len(CAPTION), len(URL)) * _ADVANCE
    width = _HEIGHT + 8 + text_w + 8
    canvas = np.empty((_HEIGHT, width, 3), dtype=np.uint8)
    canvas[...] = _BACKGROUND
    _draw_logo(canvas)
    _draw_text(canvas, CAPTION, _HEIGHT + 8, 12, (255, 255, 255))
    _draw_text(canvas, URL, _HEIGHT + 8, 36, (140, 200, 255))
    return canvas


def stamp_digest(pixels: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(f"{pixels.shape[1]}x{pixels.shape[0]}:".encode())
    h.update(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())
    return h.hexdigest()


@lru_cache(maxsize=None)
def watermark_asset() -> RasterImage:
    pixels = _render()
    digest = stamp_digest(pixels)
    if digest != STAMP_SHA256:
        raise RuntimeError(f"watermark stamp v{STAMP_VERSION} rendered with digest {digest}, expected {STAMP_SHA256}")
    return RasterImage(pixels)
