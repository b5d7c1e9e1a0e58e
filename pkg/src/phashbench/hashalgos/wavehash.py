"""Haar wavelet hash (64 bits) in the style of the ImageHash ``whash``."""
import numpy as np

from ..imageio import RasterImage, resize, to_luma
from .bithash import BitHash
from .transforms import HaarPyramid, haar_dwt_levels, haar_idwt, median_bits

HASH_SIDE = 8
MAX_SIDE = 64
_ATOL = 1e-12 * MAX_SIDE


def working_side(width: int, height: int) -> int:
    natural = 1 << (min(width, height).bit_length() - 1)
    return min(max(HASH_SIDE, natural), MAX_SIDE)


def wavehash64(img: RasterImage) -> BitHash:
    side = working_side(img.width, img.height)
    plane = resize(to_luma(img), side, side, "box-area").values / 255.0

    # drop global luminance: zero the coarsest approximation and rebuild
    full = haar_dwt_levels(plane, side.bit_length() - 1)
    plane = haar_idwt(HaarPyramid(np.zeros_like(full.approx), full.details))

    levels = (side // HASH_SIDE).bit_length() - 1
    low = haar_dwt_levels(plane, levels).approx
    return BitHash.from_bits("wavehash", median_bits(low, _ATOL))
