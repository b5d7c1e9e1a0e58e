"""Cut the 100 golden-vector fixture images from the desk sources.

Crops are drawn with a fixed seed, resized with Pillow's Lanczos filter to
a long side between 64 and 640 px and stored as JPEG q90.
"""
import argparse
from pathlib import Path

import numpy as np
from PIL import Image


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sources", type=Path, default=Path("data/desk_sources"))
    ap.add_argument("--out", type=Path, default=Path("tests/fixtures/golden"))
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    sources = sorted(args.sources.glob("*.jpg"))
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        src = sources[i % len(sources)]
        im = Image.open(src).convert("RGB")
        w, h = im.size
        cw = int(w * rng.uniform(0.4, 1.0))
        ch = int(h * rng.uniform(0.4, 1.0))
        x0 = int(rng.integers(0, w - cw + 1))
        y0 = int(rng.integers(0, h - ch + 1))
        crop = im.crop((x0, y0, x0 + cw, y0 + ch))
        long_side = int(rng.integers(64, 641))
        scale = long_side / max(cw, ch)
        size = (max(16, round(cw * scale)), max(16, round(ch * scale)))
        crop = crop.resize(size, Image.Resampling.LANCZOS)
        crop.save(args.out / f"fx{i:03d}.jpg", quality=90)


if __name__ == "__main__":
    main()
