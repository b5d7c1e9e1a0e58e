"""Collect the natural photographs used to derive the desk corpus.

Sources are sample images shipped with installed scientific Python packages
plus the ``samples/data`` directory of the opencv-python 4.10.0.84 sdist
(extract it first and pass the directory with ``--opencv-samples``).
Every photo is re-encoded as JPEG q95 with its long side capped at 1024 px.
"""
import argparse
import hashlib
import os
from pathlib import Path

from PIL import Image

OPENCV = [
    "aloeL.jpg", "smarties.png", "butterfly.jpg", "home.jpg", "fruits.jpg",
    "apple.jpg", "baboon.jpg", "orange.jpg", "squirrel_cls.jpg", "messi5.jpg",
    "rubberwhale1.png", "licenseplate_motion.jpg", "left.jpg", "aero1.jpg",
    "aero3.jpg", "board.jpg", "stuff.jpg", "choriginal.jpg", "pca_test1.jpg",
    "chicky_512.png", "text_defocus.jpg", "leuvenA.jpg", "starry_night.jpg",
    "graf1.png", "building.jpg", "ela_original.jpg", "box_in_scene.png",
    "basketball1.png", "sudoku.png",
]
SKIMAGE = [
    "astronaut.png", "brick.png", "camera.png", "chelsea.png", "coffee.png",
    "coins.png", "grass.png", "gravel.png", "hubble_deep_field.jpg", "ihc.png",
    "moon.png", "motorcycle_left.png", "page.png", "retina.jpg", "rocket.jpg",
    "text.png", "clock_motion.png",
]


def _package_dir(name):
    mod = __import__(name)
    return Path(os.path.dirname(mod.__file__))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--opencv-samples", type=Path, required=True)
    ap.add_argument("--out", type=Path, default=Path("data/desk_sources"))
    args = ap.parse_args()

    found = {p.name: p for p in args.opencv_samples.rglob("*") if p.is_file()}
    paths = [("cv_" + n, found[n]) for n in OPENCV]
    paths += [("ski_" + n, _package_dir("skimage") / "data" / n) for n in SKIMAGE]
    paths += [("skl_" + n, _package_dir("sklearn") / "datasets" / "images" / n)
              for n in ("china.jpg", "flower.jpg")]
    import matplotlib
    paths.append(("mpl_grace_hopper.jpg",
                  Path(matplotlib.get_data_path()) / "sample_data" / "grace_hopper.jpg"))

    args.out.mkdir(parents=True, exist_ok=True)
    for name, path in paths:
        im = Image.open(path).convert("RGB")
        im.thumbnail((1024, 1024), Image.Resampling.LANCZOS)
        dest = args.out / (Path(name).stem + ".jpg")
        im.save(dest, quality=95)
        digest = hashlib.sha256(dest.read_bytes()).hexdigest()[:12]
        print(f"{dest.name}\t{im.size[0]}x{im.size[1]}\t{digest}")


if __name__ == "__main__":
    main()
