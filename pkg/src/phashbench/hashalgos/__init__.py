"""The five perceptual hash algorithms behind one dispatch table."""
from ..errors import UnknownAlgorithm
from ..imageio import RasterImage
from .bithash import ALGORITHM_BITS, EXTERNAL, BitHash, hex_width
from .blockhash import blockhash256
from .colourhash import colourhash
from .pdq import PdqResult, pdq256
from .phash import phash64
from .transforms import dct2, haar_dwt_levels, haar_idwt, idct2
from .wavehash import wavehash64

ALGORITHMS = tuple(sorted(ALGORITHM_BITS))

_DISPATCH = {
    "blockhash": blockhash256,
    "colourhash": colourhash,
    "pdq": lambda img: pdq256(img).hash,
    "phash": phash64,
    "wavehash": wavehash64,
}


def hash_image(algo: str, img: RasterImage) -> BitHash:
    try:
        fn = _DISPATCH[algo]
    except KeyError:
        raise UnknownAlgorithm(
            f"unknown algorithm {algo!r}; supported: {', '.join(ALGORITHMS)}"
        ) from None
    return fn(img)


__all__ = [
    "ALGORITHMS", "ALGORITHM_BITS", "EXTERNAL", "BitHash", "PdqResult",
    "blockhash256", "colourhash", "dct2", "haar_dwt_levels", "haar_idwt",
    "hash_image", "hex_width", "idct2", "pdq256", "phash64", "wavehash64",
]
