"""Colour distribution hash after the ImageHash ``colorhash`` scheme.

Pixels fall into 14 categories: black (integer Rec.601 luma below 32), gray, and
6 hue bins at two saturation levels. Each category's share is quantized to 3 bits. Hue bins
are shares of the chromatic pixels; black and gray are shares of the whole
image.
"""
import numpy as np
from PIL import Image

from ..imageio import RasterImage
from .bithash import ALGORITHM_BITS, BitHash

BLACK_LUMA = 32
GRAY_S = 86
HIGH_S = 171
HUE_BINS = 6
BIN_BITS = 3
CATEGORIES = 2 + 2 * HUE_BINS


def hsv8(img: RasterImage):
    """Hue, saturation and value on 0-255 integer scales, as Pillow converts them."""
    hsv = np.asarray(Image.fromarray(img.pixels).convert("HSV")).astype(np.int64)
    return hsv[..., 0], hsv[..., 1], hsv[..., 2]


def category_levels(img: RasterImage) -> np.ndarray:
    """The 14 quantized category shares, each in 0..7."""
    hue, sat, _ = hsv8(img)
    n = hue.size
    # integer Rec.601 luma, rounded the way Pillow's "L" mode does
    luma = np.asarray(Image.fromarray(img.pixels).convert("L"))
    black = luma < BLACK_LUMA
    gray = ~black & (sat < GRAY_S)
    colour = ~black & ~gray
    hue_bin = np.minimum(hue * HUE_BINS // 255, HUE_BINS - 1)
    low = np.bincount(hue_bin[colour & (sat < HIGH_S)], minlength=HUE_BINS)
    high = np.bincount(hue_bin[colour & (sat >= HIGH_S)], minlength=HUE_BINS)
    n_colour = max(1, int(colour.sum()))

    levels = 1 << BIN_BITS
    fracs = [black.sum() / n, gray.sum() / n]
    fracs += [c / n_colour for c in low] + [c / n_colour for c in high]
    return np.array([min(levels - 1, int(f * levels)) for f in fracs], dtype=np.int64)


def levels_to_bits(levels) -> np.ndarray:
    shifts = np.arange(BIN_BITS - 1, -1, -1)
    payload = ((np.asarray(levels)[:, None] >> shifts) & 1).astype(bool).ravel()
    pad = ALGORITHM_BITS["colourhash"] - payload.size
    return np.concatenate([payload, np.zeros(pad, dtype=bool)])


def bits_to_levels(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)[: CATEGORIES * BIN_BITS].reshape(CATEGORIES, BIN_BITS)
    return bits @ (1 << np.arange(BIN_BITS - 1, -1, -1))


def colourhash(img: RasterImage) -> BitHash:
    return BitHash.from_bits("colourhash", levels_to_bits(category_levels(img)))
