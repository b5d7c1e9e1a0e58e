"""Block mean value hash (256 bits), after the Commons Machinery C code."""
import numpy as np

from ..imageio import RasterImage
from .bithash import BitHash

GRID = 16
BANDS = 4


def _overlap_weights(n: int) -> np.ndarray:
    """Integer (n, GRID) overlaps in units of 1/GRID pixel.

    Scaling coordinates by GRID puts pixel x on [GRID*x, GRID*x + GRID) and
    block j on [j*n, (j+1)*n), so every overlap is an exact integer.
    """
    px_lo = GRID * np.arange(n)[:, None]
    blk_lo = n * np.arange(GRID)[None, :]
    w = np.minimum(px_lo + GRID, blk_lo + n) - np.maximum(px_lo, blk_lo)
    return np.clip(w, 0, None).astype(np.int64)


def block_values(img: RasterImage) -> np.ndarray:
    """(GRID, GRID) sums of R+G+B per block, pixels split across block edges."""
    total = img.pixels.astype(np.int64).sum(axis=2)
    return _overlap_weights(img.height).T @ total @ _overlap_weights(img.width)


def blockhash256(img: RasterImage) -> BitHash:
    blocks = block_values(img).ravel()
    band = blocks.size // BANDS
    bits = np.zeros(blocks.size, dtype=bool)
    for b in range(BANDS):
        part = blocks[b * band:(b + 1) * band]
        bits[b * band:(b + 1) * band] = part > np.median(part)
    return BitHash.from_bits("blockhash", bits)
