"""A reproducible desk-scale corpus cut from a handful of source photographs.

Each source yields a fixed number of crops at random positions, sizes and
aspect ratios, resized so the long side lands in a web-photo range. Crops
from one source may overlap only a little (intersection over union at most
``max_iou``), and near-flat crops are rejected, since a featureless patch
is a near-duplicate of every other featureless patch. Everything is drawn
from a generator keyed on (seed, source name), so the corpus depends only
on the source files and the seed.
"""
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyCorpus, UnreadablePath
from .imageio import RasterImage, encode_jpeg, read_image, resize, to_luma

SOURCE_SUFFIXES = (".jpg", ".jpeg", ".png")
DEFAULT_SEED = 20221207


@dataclass(frozen=True)
class CropPlan:
    image_id: str
    source: str
    box: tuple  # (x0, y0, w, h) in source pixels
    size: tuple  # (w, h) written

    def iou(self, other: "CropPlan") -> float:
        ax, ay, aw, ah = self.box
        bx, by, bw, bh = other.box
        iw = max(0, min(ax + aw, bx + bw) - max(ax, bx))
        ih = max(0, min(ay + ah, by + bh) - max(ay, by))
        inter = iw * ih
        return inter / (aw * ah + bw * bh - inter)


def _rng(seed: int, name: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.Generator(np.random.Philox(key=np.frombuffer(digest[:16], dtype=np.uint64)))


def plan_crops(name: str, img: RasterImage, per_source: int, seed: int = DEFAULT_SEED,
               long_side=(320, 500), min_frac=0.25, max_frac=0.75, max_iou=0.45,
               min_texture=12.0, attempts=4000) -> list:
    rng = _rng(seed, name)
    luma = to_luma(img).values
    short = min(img.width, img.height)
    plans = []
    for _ in range(attempts):
        if len(plans) == per_source:
            break
        side = rng.uniform(min_frac, max_frac) * short
        aspect = math.exp(rng.uniform(math.log(2 / 3), math.log(3 / 2)))
        w = min(img.width, int(round(side * math.sqrt(aspect))))
        h = min(img.height, int(round(side / math.sqrt(aspect))))
        x0 = int(rng.integers(0, img.width - w + 1))
        y0 = int(rng.integers(0, img.height - h + 1))
        target = int(rng.integers(long_side[0], long_side[1] + 1))
        cand = CropPlan(f"{name}_{len(plans):03d}", name, (x0, y0, w, h), (0, 0))
        if any(cand.iou(p) > max_iou for p in plans):
            continue
        if luma[y0:y0 + h, x0:x0 + w].std() < min_texture:
            continue
        scale = target / max(w, h)
        out = (max(1, int(round(w * scale))), max(1, int(round(h * scale))))
        plans.append(CropPlan(cand.image_id, name, cand.box, out))
    return plans


def render(img: RasterImage, plan: CropPlan) -> RasterImage:
    x0, y0, w, h = plan.box
    crop = RasterImage(img.pixels[y0:y0 + h, x0:x0 + w])
    kernel = "box-area" if plan.size[0] < w else "bicubic"
    return resize(crop, plan.size[0], plan.size[1], kernel)


def list_sources(src_dir) -> list:
    src_dir = Path(src_dir)
    if not src_dir.is_dir():
        raise UnreadablePath(f"{src_dir} is not a directory")
    files = sorted(p for p in src_dir.iterdir() if p.suffix.lower() in SOURCE_SUFFIXES)
    if not files:
        raise EmptyCorpus(f"no source images in {src_dir}")
    return files


def build_desk_corpus(src_dir, out_dir, target: int = 2100, seed: int = DEFAULT_SEED,
                      quality: int = 92) -> list:
    """Write about ``target`` crops as JPEG files plus a ``crops.tsv`` provenance table.

    Existing files with the expected name are kept, so an interrupted build
    resumes where it stopped.
    """
    files = list_sources(src_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    per_source = -(-target // len(files))
    plans = []
    for path in files:
        img = read_image(path)
        name = path.stem
        src_plans = plan_crops(name, img, per_source, seed)
        for plan in src_plans:
            dest = out_dir / f"{plan.image_id}.jpg"
            if not dest.exists():
                dest.write_bytes(encode_jpeg(render(img, plan), quality))
        plans.extend(src_plans)
    with open(out_dir / "crops.tsv", "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["image_id", "source", "x0", "y0", "w", "h", "out_w", "out_h"])
        for p in plans:
            w.writerow([p.image_id, p.source, *p.box, *p.size])
    return plans


def read_provenance(corpus_dir) -> dict:
    """image_id -> CropPlan, from the table written by ``build_desk_corpus``."""
    out = {}
    with open(Path(corpus_dir) / "crops.tsv", newline="") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            box = tuple(int(row[k]) for k in ("x0", "y0", "w", "h"))
            size = (int(row["out_w"]), int(row["out_h"]))
            out[row["image_id"]] = CropPlan(row["image_id"], row["source"], box, size)
    return out


def near_duplicate(a: CropPlan, b: CropPlan, max_iou: float = 0.45) -> bool:
    return a.source == b.source and a.iou(b) > max_iou
