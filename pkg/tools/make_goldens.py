"""Generate golden vectors for the fixture set from reference implementations.

Requires the dev-only packages ``imagehash``, ``pdqhash`` and ``PyWavelets``
plus tools/reference_blockhash.py. Images are decoded by Pillow exactly as
the references expect; the package under test is not imported.
"""
import argparse
import json
import sys
from pathlib import Path

import imagehash
import numpy as np
import pdqhash
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))
import reference_blockhash  # noqa: E402


def pdq_hex(vector) -> str:
    # pdqhash's vector is already in hex order: coefficient 255 leads
    return np.packbits(np.asarray(vector, dtype=np.uint8)).tobytes().hex()


def colorhash_levels(im, binbits=3):
    """The per-category levels inside ``imagehash.colorhash``.

    imagehash packs each level with ``v // 2**(b-i-1) % 2**(b-i) > 0``,
    which is not plain binary (4 and 6 both become 110), so the levels
    cannot be read back from its hash. This transcribes its computation
    up to the packing step; main() checks the transcription by re-packing.
    """
    intensity = np.asarray(im.convert("L")).flatten()
    h, s, v = [np.asarray(c).flatten() for c in im.convert("HSV").split()]
    mask_black = intensity < 256 // 8
    frac_black = mask_black.mean()
    mask_gray = s < 256 // 3
    frac_gray = np.logical_and(~mask_black, mask_gray).mean()
    mask_colors = np.logical_and(~mask_black, ~mask_gray)
    mask_faint = np.logical_and(mask_colors, s < 256 * 2 // 3)
    mask_bright = np.logical_and(mask_colors, s > 256 * 2 // 3)
    c = max(1, mask_colors.sum())
    hue_bins = np.linspace(0, 255, 6 + 1)
    faint = np.histogram(h[mask_faint], bins=hue_bins)[0] if mask_faint.any() else np.zeros(6)
    bright = np.histogram(h[mask_bright], bins=hue_bins)[0] if mask_bright.any() else np.zeros(6)
    maxvalue = 2 ** binbits
    values = [min(maxvalue - 1, int(frac_black * maxvalue)), min(maxvalue - 1, int(frac_gray * maxvalue))]
    for counts in list(faint) + list(bright):
        values.append(min(maxvalue - 1, int(counts * maxvalue * 1.0 / c)))
    return values


def imagehash_pack(values, binbits=3):
    return [v // (2 ** (binbits - i - 1)) % 2 ** (binbits - i) > 0 for v in values for i in range(binbits)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fixtures", type=Path, default=Path("tests/fixtures/golden"))
    ap.add_argument("--out", type=Path, default=Path("tests/fixtures/golden/goldens.json"))
    args = ap.parse_args()

    goldens = {}
    for path in sorted(args.fixtures.glob("*.jpg")):
        im = Image.open(path).convert("RGB")
        vector, quality = pdqhash.compute(np.asarray(im))
        levels = colorhash_levels(im)
        emitted = imagehash.colorhash(im, binbits=3).hash.ravel().tolist()
        assert imagehash_pack(levels) == emitted, path.name
        goldens[path.name] = {
            "phash": str(imagehash.phash(im)),
            "wavehash": str(imagehash.whash(im)),
            "blockhash": reference_blockhash.blockhash(im, 16),
            "pdq": pdq_hex(vector),
            "pdq_quality": int(quality),
            "colourhash_levels": [int(v) for v in levels],
            "colourhash_imagehash_hex": str(imagehash.colorhash(im, binbits=3)),
        }
    meta = {
        "generator": "tools/make_goldens.py",
        "imagehash": imagehash.__version__,
        "pdqhash": getattr(pdqhash, "__version__", "unknown"),
    }
    args.out.write_text(json.dumps({"meta": meta, "fixtures": goldens}, indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(goldens)} fixtures to {args.out}")


if __name__ == "__main__":
    main()
