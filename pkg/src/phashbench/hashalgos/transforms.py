"""Transform kernels shared by the hash algorithms.

The cosine bases are cached per size and returned read-only, so they can be
shared freely between threads and worker processes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import NonPow2Input

_SQRT_HALF = np.sqrt(0.5)


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row k is frequency k."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    m.flags.writeable = False
    return m


def dct2(x) -> np.ndarray:
    """Orthonormal 2-D DCT-II of a square matrix.

    The first sample is subtracted before transforming and restored on the
    DC term, so flat inputs give AC coefficients that are exactly zero.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if x.ndim != 2 or x.shape[1] != n or n < 2:
        raise ValueError(f"dct2 needs a square matrix with N >= 2, got {x.shape}")
    c = dct_matrix(n)
    offset = x[0, 0]
    out = c @ (x - offset) @ c.T
    out[0, 0] += n * offset
    return out


def idct2(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    c = dct_matrix(y.shape[0])
    return c.T @ y @ c


def dct2_direct(x) -> np.ndarray:
    """O(N^4) textbook summation, used as a test oracle only."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    out = np.zeros((n, n))
    for u in range(n):
        au = np.sqrt(1.0 / n) if u == 0 else np.sqrt(2.0 / n)
        for v in range(n):
            av = np.sqrt(1.0 / n) if v == 0 else np.sqrt(2.0 / n)
            s = 0.0
            for i in range(n):
                for j in range(n):
                    s += x[i, j] * np.cos(np.pi * (2 * i + 1) * u / (2 * n)) * np.cos(
                        np.pi * (2 * j + 1) * v / (2 * n)
                    )
            out[u, v] = au * av * s
    return out


@dataclass(frozen=True)
class HaarPyramid:
    """Multi-level Haar decomposition.

    ``details[0]`` is the coarsest level; each entry is a
    (horizontal, vertical, diagonal) triple of equally sized bands.
    """

    approx: np.ndarray
    details: tuple

    @property
    def levels(self) -> int:
        return len(self.details)


def _haar_step(x):
    lo = (x[:, 0::2] + x[:, 1::2]) * _SQRT_HALF
    hi = (x[:, 0::2] - x[:, 1::2]) * _SQRT_HALF
    ll = (lo[0::2] + lo[1::2]) * _SQRT_HALF
    lh = (lo[0::2] - lo[1::2]) * _SQRT_HALF
    hl = (hi[0::2] + hi[1::2]) * _SQRT_HALF
    hh = (hi[0::2] - hi[1::2]) * _SQRT_HALF
    return ll, (lh, hl, hh)


def _haar_unstep(ll, bands):
    lh, hl, hh = bands
    h, w = ll.shape
    lo = np.empty((2 * h, w))
    hi = np.empty((2 * h, w))
    lo[0::2] = (ll + lh) * _SQRT_HALF
    lo[1::2] = (ll - lh) * _SQRT_HALF
    hi[0::2] = (hl + hh) * _SQRT_HALF
    hi[1::2] = (hl - hh) * _SQRT_HALF
    x = np.empty((2 * h, 2 * w))
    x[:, 0::2] = (lo + hi) * _SQRT_HALF
    x[:, 1::2] = (lo - hi) * _SQRT_HALF
    return x


def haar_dwt_levels(x, levels: int) -> HaarPyramid:
    """Orthonormal Haar analysis of an S x S matrix, S a power of two."""
    x = np.asarray(x, dtype=np.float64)
    s = x.shape[0]
    if x.ndim != 2 or x.shape[1] != s or s < 1 or s & (s - 1):
        raise NonPow2Input(f"Haar input must be square with power-of-two side, got {x.shape}")
    if not 0 <= levels <= s.bit_length() - 1:
        raise ValueError(f"at most {s.bit_length() - 1} levels for side {s}, asked for {levels}")
    details = []
    approx = x
    for _ in range(levels):
        approx, bands = _haar_step(approx)
        details.append(bands)
    return HaarPyramid(approx, tuple(reversed(details)))


def haar_idwt(pyramid: HaarPyramid) -> np.ndarray:
    x = pyramid.approx
    for bands in pyramid.details:
        x = _haar_unstep(x, bands)
    return x


def median_bits(values, atol: float) -> np.ndarray:
    """Bits set where a value exceeds the median of all values.

    Values within ``atol`` of the median count as ties (bit 0); ``atol``
    should sit far below the signal scale and far above rounding noise.
    The median of an even count is the mean of the two central values.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    return values > np.median(values) + atol
