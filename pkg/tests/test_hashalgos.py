import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phashbench.errors import NonPow2Input, UnknownAlgorithm
from phashbench.hashalgos import (ALGORITHM_BITS, ALGORITHMS, BitHash, blockhash256, dct2, haar_dwt_levels,
                                  haar_idwt, hash_image, hex_width, idct2, pdq256, phash64, wavehash64)
from phashbench.hashalgos import blockhash as bh
from phashbench.hashalgos import pdq
from phashbench.hashalgos.transforms import dct2_direct, dct_matrix, median_bits
from phashbench.hashalgos.wavehash import working_side
from phashbench.imageio import RasterImage, resize

from conftest import noise_image, smooth_image

ch = sys.modules["phashbench.hashalgos.colourhash"]


# -- bit strings ---------------------------------------------------------------

@given(st.integers(1, 300), st.data())
def test_bithash_hex_roundtrip(length, data):
    value = data.draw(st.integers(0, (1 << length) - 1))
    h = BitHash("external", length, value)
    text = h.hex()
    assert len(text) == hex_width(length)
    assert BitHash.from_hex("external", text, length) == h
    assert BitHash.from_bits("external", h.bits) == h


def test_bithash_msb_first():
    h = BitHash.from_bits("external", [1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
    assert h.hex() == "201"
    assert h.bits.tolist()[:2] == [True, False]


def test_bithash_declared_lengths():
    with pytest.raises(ValueError):
        BitHash("phash", 63, 0)
    with pytest.raises(ValueError):
        BitHash("external", 4, 16)
    with pytest.raises(ValueError):
        BitHash.from_hex("phash", "abc", 64)


# -- transforms -------------------------------------------------------------

def test_dct_basis_orthonormal():
    for n in (8, 16, 32):
        c = dct_matrix(n)
        assert np.abs(c @ c.T - np.eye(n)).max() < 1e-12


def test_dct2_constant():
    out = dct2(np.full((32, 32), 3.5))
    assert out[0, 0] == pytest.approx(32 * 3.5, abs=1e-9)
    ac = out.copy()
    ac[0, 0] = 0
    assert np.abs(ac).max() < 1e-9


def test_dct2_inverse_and_not_involution():
    x = np.random.default_rng(0).normal(size=(16, 16))
    assert np.abs(idct2(dct2(x)) - x).max() < 1e-9
    assert np.abs(dct2(dct2(x)) - x).max() > 1e-3


def test_dct2_matches_direct_sum_8x8():
    x = np.random.default_rng(1).uniform(0, 255, (8, 8))
    assert np.abs(dct2(x) - dct2_direct(x)).max() < 1e-9


def test_haar_constant():
    for levels in (1, 2, 3):
        pyr = haar_dwt_levels(np.full((16, 16), 2.0), levels)
        assert pyr.approx.shape == (16 >> levels,) * 2
        assert np.allclose(pyr.approx, 2.0 * 2 ** levels)
        assert all(np.abs(b).max() < 1e-12 for bands in pyr.details for b in bands)


def test_haar_roundtrip():
    x = np.random.default_rng(2).normal(size=(64, 64))
    assert np.abs(haar_idwt(haar_dwt_levels(x, 6)) - x).max() < 1e-9


def test_haar_hand_example():
    x = np.array([[1, 1, 2, 2], [1, 1, 2, 2], [3, 3, 4, 4], [3, 3, 4, 4]], float)
    assert np.allclose(haar_dwt_levels(x, 1).approx, [[2, 4], [6, 8]])


def test_haar_rejects_bad_input():
    with pytest.raises(NonPow2Input):
        haar_dwt_levels(np.zeros((12, 12)), 1)
    with pytest.raises(NonPow2Input):
        haar_dwt_levels(np.zeros((8, 16)), 1)
    with pytest.raises(ValueError):
        haar_dwt_levels(np.zeros((8, 8)), 4)


def test_median_bits_even_count_uses_central_mean():
    assert median_bits([1, 2, 3, 4], 0).tolist() == [False, False, True, True]
    assert median_bits([5, 5, 5, 5], 1e-9).tolist() == [False] * 4


# -- constant images --------------------------------------------------------

LEVELS = [1, 64, 128, 200, 255]


@pytest.mark.parametrize("level", LEVELS)
def test_phash_constant_grey(level):
    assert phash64(RasterImage.filled(40, 30, (level,) * 3)).hex() == "8000000000000000"


def test_phash_black_has_no_positive_coefficient():
    # DC is 0 too, so nothing exceeds the median
    assert phash64(RasterImage.filled(40, 30)).hex() == "0" * 16


@pytest.mark.parametrize("level", [0] + LEVELS)
def test_constant_images_hash_to_zero(level):
    img = RasterImage.filled(50, 37, (level,) * 3)
    assert wavehash64(img).value == 0
    assert blockhash256(img).value == 0
    res = pdq256(img)
    assert res.hash.value == 0 and res.quality == 0


# -- per-algorithm behaviour ---------------------------------------------------

def test_blockhash_half_black_half_white():
    px = np.zeros((48, 64, 3), np.uint8)
    px[:, 32:] = 255
    assert blockhash256(RasterImage(px)).hex() == "00ff" * 16


def test_blockhash_block_sums_apportion_every_pixel():
    img = noise_image(3, 37, 23)
    total = int(img.pixels.astype(np.int64).sum())
    # each pixel's overlaps sum to GRID on both axes
    assert int(bh.block_values(img).sum()) == total * bh.GRID ** 2


def test_blockhash_divisible_matches_plain_block_sums():
    img = noise_image(4, 32, 48)
    plain = img.pixels.astype(np.int64).sum(axis=2).reshape(16, 3, 16, 2).sum(axis=(1, 3))
    assert np.array_equal(bh.block_values(img), plain * bh.GRID ** 2)


def test_wavehash_working_side():
    assert working_side(5, 5) == 8
    assert working_side(100, 50) == 32
    assert working_side(1000, 700) == 64


def test_pdq_window_and_box_filter():
    assert pdq.window_size(64) == 1
    assert pdq.window_size(500) == 4
    x = np.random.default_rng(5).uniform(size=(1, 30))
    w = 5
    out = pdq.box_filter(x, w, axis=1)
    right = (w + 2) // 2 - 1
    left = w - right - 1
    naive = [x[0, max(0, k - left):k + right + 1].mean() for k in range(30)]
    assert np.allclose(out[0], naive)


def test_pdq_basis_excludes_dc():
    b = pdq.dct_basis()
    assert b.shape == (16, 64)
    assert np.abs(b.sum(axis=1)).max() < 1e-9  # no constant component


def test_pdq_quality_on_photo(photo):
    assert 0 < pdq256(photo).quality <= 100


def test_colourhash_black():
    levels = ch.category_levels(RasterImage.filled(10, 10))
    assert levels.tolist() == [7] + [0] * 13


def test_colourhash_pure_red():
    levels = ch.category_levels(RasterImage.filled(10, 10, (255, 0, 0)))
    assert levels[0] == 0 and levels[1] == 0
    assert sorted(levels[2:].tolist()) == [0] * 11 + [7]
    assert hash_image("colourhash", RasterImage.filled(3, 3, (255, 0, 0))).length == 44


def test_colourhash_bits_roundtrip():
    levels = np.arange(14) % 8
    bits = ch.levels_to_bits(levels)
    assert bits.size == 44 and not bits[42:].any()
    assert np.array_equal(ch.bits_to_levels(bits), levels)


# -- dispatch and generic properties ---------------------------------------

def test_unknown_algorithm_lists_supported():
    with pytest.raises(UnknownAlgorithm, match="phash"):
        hash_image("neuralhash", RasterImage.filled(4, 4))


def test_dispatch_examples():
    grey = RasterImage.filled(20, 20, (90, 90, 90))
    assert hash_image("phash", grey).hex() == "8000000000000000"
    assert len(hash_image("pdq", noise_image(0, 30, 30))) == 256


@settings(max_examples=12, deadline=None)
@given(st.integers(16, 90), st.integers(16, 90), st.integers(0, 10_000))
def test_declared_lengths_and_determinism(w, h, seed):
    img = smooth_image(seed, w, h)
    for algo in ALGORITHMS:
        a = hash_image(algo, img)
        assert a.length == ALGORITHM_BITS[algo]
        assert a == hash_image(algo, img)


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_identity_resize_keeps_hash(algo, photo):
    same = resize(photo, photo.width, photo.height, "bicubic")
    assert hash_image(algo, same) == hash_image(algo, photo)
