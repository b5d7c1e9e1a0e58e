"""DCT hash (64 bits) in the style of the ImageHash ``phash``."""

from ..imageio import RasterImage, resize, to_luma
from .bithash import BitHash
from .transforms import dct2, median_bits

SIDE = 32
LOW = 8
# DCT coefficients of a 32x32 plane of 8-bit luma stay below 32 * 255
_ATOL = 1e-12 * SIDE * 255


def phash64(img: RasterImage) -> BitHash:
    small = resize(to_luma(img), SIDE, SIDE, "box-area").values
    low = dct2(small)[:LOW, :LOW]
    return BitHash.from_bits("phash", median_bits(low, _ATOL))
