"""Regression check against hashes captured once from reference implementations.

A golden file is JSON: ``{"meta": {...}, "fixtures": {file name: {...}}}``,
with fixture images stored next to it. Each algorithm is judged under its
own tolerance band; ColourHash is compared on its 14 quantized category
levels rather than on packed bits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, MissingGoldens
from .hashalgos import BitHash, hash_image
from .hashalgos.colourhash import category_levels
from .imageio import read_image

# differing bits (differing categories for colourhash) allowed per fixture
TOLERANCES = {"blockhash": 16, "colourhash": 2, "pdq": 10, "phash": 6, "wavehash": 6}
_BITS = {"blockhash": 256, "pdq": 256, "phash": 64, "wavehash": 64}


@dataclass(frozen=True)
class GoldenResult:
    fixture: str
    algo: str
    diff: int
    limit: int

    @property
    def ok(self) -> bool:
        return self.diff <= self.limit


def load_goldens(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingGoldens(f"golden vector file {path} not found")
    try:
        data = json.loads(path.read_text())
        return data["fixtures"]
    except (ValueError, KeyError) as exc:
        raise FormatError(f"{path} is not a golden vector file: {exc}") from exc


def check_goldens(path, algorithms=None, tolerances=None) -> list:
    """One ``GoldenResult`` per (fixture, algorithm), fixtures in name order."""
    path = Path(path)
    fixtures = load_goldens(path)
    tolerances = {**TOLERANCES, **(tolerances or {})}
    algorithms = sorted(algorithms or TOLERANCES)
    out = []
    for name in sorted(fixtures):
        gold = fixtures[name]
        img = read_image(path.parent / name)
        for algo in algorithms:
            if algo == "colourhash":
                ref = np.asarray(gold["colourhash_levels"])
                diff = int(np.count_nonzero(category_levels(img) != ref))
            else:
                ref = BitHash.from_hex(algo, gold[algo], _BITS[algo])
                diff = (hash_image(algo, img).value ^ ref.value).bit_count()
            out.append(GoldenResult(name, algo, diff, tolerances[algo]))
    return out
