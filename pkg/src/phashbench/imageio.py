"""Raster decoding, JPEG encoding, luma conversion and resampling.

Everything here is a pure function of its arguments. Resampling is done
with our own separable kernels so hashes do not drift with the Pillow
version installed; Pillow is only used for the JPEG/PNG codecs.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import MalformedStream, UnsupportedFormat

KERNELS = ("nearest", "bilinear", "box-area", "bicubic")
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB raster, shape (height, width, 3), read-only."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixels, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if px.dtype != np.uint8:
            if px.min() < 0 or px.max() > 255:
                raise ValueError("channel values outside [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, RasterImage) and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    @classmethod
    def filled(cls, width: int, height: int, rgb=(0, 0, 0)) -> "RasterImage":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[...] = np.asarray(rgb, dtype=np.uint8)
        return cls(px)


@dataclass(frozen=True, eq=False)
class GrayBuffer:
    """Real-valued luma plane, shape (height, width), values in [0, 255]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"expected non-empty (h, w) values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("luma values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def _composite_over_black(rgba: np.ndarray) -> np.ndarray:
    rgb = rgba[..., :3].astype(np.uint32)
    alpha = rgba[..., 3:4].astype(np.uint32)
    return ((rgb * alpha + 127) // 255).astype(np.uint8)


def decode_image(data: bytes) -> RasterImage:
    """Decode a JPEG or PNG byte stream to an RGB raster.

    16-bit samples are truncated to their high byte and any alpha channel
    is composited over black. EXIF orientation is ignored.
    """
    try:
        im = Image.open(io.BytesIO(data))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise MalformedStream(f"not a decodable image stream: {exc}") from exc
    if im.format not in ("JPEG", "PNG"):
        raise UnsupportedFormat(f"unsupported container {im.format!r}")
    try:
        im.load()
    except (OSError, SyntaxError, ValueError) as exc:
        raise MalformedStream(str(exc)) from exc

    mode = im.mode
    if mode in ("I;16", "I;16B", "I;16L", "I"):
        arr = np.asarray(im).astype(np.int64) >> 8
        gray = np.clip(arr, 0, 255).astype(np.uint8)
        return RasterImage(np.repeat(gray[..., None], 3, axis=2))
    if mode == "P" and "transparency" in im.info:
        im = im.convert("RGBA")
    elif mode in ("LA", "PA", "La", "RGBa"):
        im = im.convert("RGBA")
    if im.mode == "RGBA":
        return RasterImage(_composite_over_black(np.asarray(im)))
    return RasterImage(np.asarray(im.convert("RGB")))


def read_image(path) -> RasterImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_jpeg(img: RasterImage, quality: int) -> bytes:
    """Baseline JPEG with libjpeg's standard quality scaling of the default tables.

    Chroma is subsampled 4:2:0 below quality 90 and kept at 4:4:4 from 90 up.
    """
    if not 1 <= int(quality) <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    buf = io.BytesIO()
    Image.fromarray(img.pixels, "RGB").save(
        buf,
        format="JPEG",
        quality=int(quality),
        subsampling=0 if quality >= 90 else 2,
        optimize=False,
        progressive=False,
    )
    return buf.getvalue()


def encode_png(img: RasterImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, "RGB").save(buf, format="PNG", compress_level=1)
    return buf.getvalue()


def to_luma(img: RasterImage) -> GrayBuffer:
    """Rec.601 luma, kept real-valued."""
    return GrayBuffer(img.pixels.astype(np.float64) @ LUMA_WEIGHTS)


# -- resampling ---------------------------------------------------------------

def _triangle(x):
    x = np.abs(x)
    return np.where(x < 1.0, 1.0 - x, 0.0)


def _catmull_rom(x):
    # cubic convolution with a = -0.5
    x = np.abs(x)
    a = -0.5
    near = ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    far = ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    return np.where(x < 1.0, near, np.where(x < 2.0, far, 0.0))


_FILTERS = {"bilinear": (_triangle, 1.0), "bicubic": (_catmull_rom, 2.0)}


def _axis_weights(n_in: int, n_out: int, kernel: str):
    """Return (indices, weights), both (n_out, taps), for one axis."""
    scale = n_in / n_out
    centers = (np.arange(n_out) + 0.5) * scale
    if kernel == "nearest":
        idx = np.minimum(np.floor(centers).astype(np.int64), n_in - 1)
        return idx[:, None], np.ones((n_out, 1))
    if kernel == "box-area":
        lo = np.arange(n_out) * scale
        hi = lo + scale
        start = np.floor(lo).astype(np.int64)
        taps = int(math.ceil(scale)) + 1
        idx = start[:, None] + np.arange(taps)
        w = np.minimum(idx + 1, hi[:, None]) - np.maximum(idx, lo[:, None])
        w = np.where(idx < n_in, np.clip(w, 0.0, None), 0.0)
    else:
        func, support = _FILTERS[kernel]
        stretch = max(scale, 1.0)
        support *= stretch
        start = np.floor(centers - support).astype(np.int64)
        taps = int(math.ceil(2 * support)) + 2
        idx = start[:, None] + np.arange(taps)
        w = func((idx + 0.5 - centers[:, None]) / stretch)
        w = np.where((idx >= 0) & (idx < n_in), w, 0.0)
    w = w / w.sum(axis=1, keepdims=True)
    return np.clip(idx, 0, n_in - 1), w


def _resample_axis(arr: np.ndarray, n_out: int, axis: int, kernel: str) -> np.ndarray:
    n_in = arr.shape[axis]
    if n_in == n_out:
        return arr
    idx, w = _axis_weights(n_in, n_out, kernel)
    # gather along a contiguous leading axis; strided fancy indexing is slow
    moved = np.ascontiguousarray(np.moveaxis(arr, axis, 0))
    extra = (slice(None),) + (None,) * (moved.ndim - 1)
    out = w[:, 0][extra] * moved[idx[:, 0]]
    for t in range(1, idx.shape[1]):
        out += w[:, t][extra] * moved[idx[:, t]]
    return np.moveaxis(out, 0, axis)


Resizable = Union[RasterImage, GrayBuffer]


def resize(img: Resizable, new_w: int, new_h: int, kernel: str = "bicubic") -> Resizable:
    """Separable resize with normalised weights.

    Downscaling widens the bilinear and bicubic kernels by the scale factor
    so they antialias; ``box-area`` weights each source pixel by its exact
    overlap with the destination cell.
    """
    if new_w < 1 or new_h < 1:
        raise ValueError("target dimensions must be >= 1")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")
    data = img.pixels if isinstance(img, RasterImage) else img.values
    out = data.astype(np.float64)
    out = _resample_axis(out, new_w, 1, kernel)
    out = _resample_axis(out, new_h, 0, kernel)
    out = np.clip(out, 0.0, 255.0)
    if isinstance(img, RasterImage):
        return RasterImage(np.rint(out).astype(np.uint8))
    return GrayBuffer(out)


def fit_within(img: RasterImage, box: int, kernel: str = "bicubic") -> RasterImage:
    """Shrink so the long side equals ``box``; never upscales."""
    if box < 1:
        raise ValueError("box must be >= 1")
    w, h = img.width, img.height
    if max(w, h) <= box:
        return img
    if w >= h:
        new_w, new_h = box, max(1, h * box // w)
    else:
        new_w, new_h = max(1, w * box // h), box
    return resize(img, new_w, new_h, kernel)
