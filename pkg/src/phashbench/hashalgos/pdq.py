"""PDQ (256 bits) following the ThreatExchange reference pipeline.

Luma is box-filtered twice along each axis with windows sized to the
64x64 target, point-sampled down to 64x64, projected onto the 16 lowest
non-DC cosine frequencies per axis and thresholded at the median.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..imageio import RasterImage
from .bithash import BitHash
from .transforms import median_bits

BUFFER = 64
HASH_SIDE = 16
PASSES = 2
# luma is carried scaled by 1000 so box sums of integers stay exact
_LUMA_INT = np.array([299, 587, 114], dtype=np.int64)
_ATOL = 1e-12 * BUFFER * 255 * 1000


@dataclass(frozen=True)
class PdqResult:
    hash: BitHash
    quality: int


@lru_cache(maxsize=None)
def dct_basis() -> np.ndarray:
    """(16, 64) cosine basis, frequencies 1..16."""
    i = np.arange(1, HASH_SIDE + 1)[:, None]
    j = np.arange(BUFFER)[None, :]
    m = np.sqrt(2.0 / BUFFER) * np.cos(np.pi / (2 * BUFFER) * i * (2 * j + 1))
    m.flags.writeable = False
    return m


def window_size(n_in: int, n_out: int = BUFFER) -> int:
    return (n_in + 2 * n_out - 1) // (2 * n_out)


def box_filter(x: np.ndarray, window: int, axis: int) -> np.ndarray:
    """Centred running mean; near the edges only in-range samples count."""
    if window <= 1:
        return x
    n = x.shape[axis]
    right = (window + 2) // 2 - 1
    left = window - right - 1
    x = np.moveaxis(x, axis, 0)
    csum = np.concatenate([np.zeros((1,) + x.shape[1:]), np.cumsum(x, axis=0)])
    k = np.arange(n)
    hi = np.minimum(k + right + 1, n)
    lo = np.maximum(k - left, 0)
    extra = (slice(None),) + (None,) * (x.ndim - 1)
    out = (csum[hi] - csum[lo]) / (hi - lo)[extra]
    return np.moveaxis(out, 0, axis)


def downsample(luma: np.ndarray) -> np.ndarray:
    rows, cols = luma.shape
    along_rows = window_size(cols)
    along_cols = window_size(rows)
    buf = luma.astype(np.float64)
    for _ in range(PASSES):
        buf = box_filter(buf, along_rows, axis=1)
        buf = box_filter(buf, along_cols, axis=0)
    ri = ((np.arange(BUFFER) + 0.5) * rows / BUFFER).astype(np.int64)
    ci = ((np.arange(BUFFER) + 0.5) * cols / BUFFER).astype(np.int64)
    return buf[np.ix_(ri, ci)]


def quality_score(buf: np.ndarray) -> int:
    """Gradient-energy heuristic on the 64x64 buffer, clamped to 0..100."""
    dv = np.trunc((buf[:-1, :] - buf[1:, :]) * 100 / 255)
    dh = np.trunc((buf[:, :-1] - buf[:, 1:]) * 100 / 255)
    total = int(np.abs(dv).sum() + np.abs(dh).sum())
    return min(100, total // 90)


def pdq256(img: RasterImage) -> PdqResult:
    luma1000 = img.pixels.astype(np.int64) @ _LUMA_INT
    buf = downsample(luma1000)
    quality = quality_score(buf / 1000.0)
    basis = dct_basis()
    coeffs = basis @ (buf - buf[0, 0]) @ basis.T
    bits = median_bits(coeffs, _ATOL)
    # reference hex order: coefficient 255 is the leading bit
    return PdqResult(BitHash.from_bits("pdq", bits[::-1]), quality)
