"""Corpus ingestion, pair sampling, batch hashing and the two experiment drivers.

Everything a run produces is a pure function of the corpus bytes and the
manifest: pair draws are keyed on (seed, image id), hashing is per image,
and results are merged in image-id order whatever the worker count.
"""
from __future__ import annotations

import csv
import gzip
import hashlib
import json
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .errors import (CorpusTooSmall, EmptyCorpus, FormatError, LengthInconsistency, MissingHashes,
                     PhashbenchError, UnknownAlgorithm, UnknownModification, UnreadablePath)
from .hashalgos import ALGORITHM_BITS, ALGORITHMS, BitHash, hash_image, hex_width
from .imageio import decode_image
from .metrics import DistStats, LatticeCounts
from .modpipeline import EMULATED, MODIFICATIONS, ModificationSpec, apply, apply_encoded

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png")
ORIGINAL = "original"
VARIANTS = (ORIGINAL,) + MODIFICATIONS
DEFAULT_SEED = 20221207
DEFAULT_K = 50
STORE_COLUMNS = ("image_id", "variant", "algo", "bitlen", "hex")
FAILURE_COLUMNS = ("image_id", "variant", "error")
IN_MEMORY_NOTE = ("non-JPEG modifications are hashed from in-memory rasters; "
                  "no re-encode with the source quantization tables")


# -- corpus ------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    image_id: str
    path: Path
    digest: str


@dataclass(frozen=True)
class CorpusIndex:
    entries: tuple
    dedup: bool = True
    duplicates: tuple = ()  # (dropped id, kept id)

    def __len__(self):
        return len(self.entries)

    @property
    def ids(self) -> list:
        return [e.image_id for e in self.entries]

    def by_id(self) -> dict:
        return {e.image_id: e for e in self.entries}

    @property
    def digest(self) -> str:
        """Content address of the whole corpus: ids and file digests, in order."""
        h = hashlib.sha256()
        for e in self.entries:
            h.update(f"{e.image_id}\t{e.digest}\n".encode())
        return h.hexdigest()


def _file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _image_id(root: Path, path: Path) -> str:
    return path.relative_to(root).with_suffix("").as_posix()


def ingest_corpus(root, dedup: bool = True) -> CorpusIndex:
    """Index every JPEG/PNG below ``root``, sorted by image id.

    The id is the path relative to ``root`` without its extension. With
    ``dedup`` byte-identical files collapse onto the lowest id.
    """
    root = Path(root)
    if not root.is_dir():
        raise UnreadablePath(f"corpus path {root} is not a readable directory")
    files = sorted(p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    stems = Counter(_image_id(root, p) for p in files)
    entries = {}
    for p in files:
        image_id = _image_id(root, p)
        if stems[image_id] > 1:
            # same name with different extensions: keep the extension in the id
            image_id = p.relative_to(root).as_posix()
        try:
            entries[image_id] = CorpusEntry(image_id, p, _file_digest(p))
        except OSError as exc:
            raise UnreadablePath(f"cannot read {p}: {exc}") from exc
    ordered = sorted(entries.values(), key=lambda e: e.image_id)
    dropped = []
    if dedup:
        seen = {}
        kept = []
        for e in ordered:
            if e.digest in seen:
                dropped.append((e.image_id, seen[e.digest]))
                continue
            seen[e.digest] = e.image_id
            kept.append(e)
        ordered = kept
    if len(ordered) < 2:
        raise EmptyCorpus(f"{root} holds {len(ordered)} distinct image(s); at least 2 are needed")
    return CorpusIndex(tuple(ordered), dedup, tuple(dropped))


# -- sampling ----------------------------------------------------------------

def image_rng(seed: int, image_id: str) -> np.random.Generator:
    """Counter-based generator keyed on (seed, image id)."""
    digest = hashlib.sha256(f"{int(seed)}\0{image_id}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def partner_indices(ids: list, seed: int, k: int) -> np.ndarray:
    """(n, k) positions in ``ids`` of each image's partners."""
    n = len(ids)
    if n < k + 1:
        raise CorpusTooSmall(f"need at least {k + 1} images to draw {k} partners each, have {n}")
    out = np.empty((n, k), dtype=np.int64)
    for i, image_id in enumerate(ids):
        draw = image_rng(seed, image_id).choice(n - 1, size=k, replace=False)
        out[i] = draw + (draw >= i)  # skip self
    return out


def sample_pairs(index: CorpusIndex, seed: int = DEFAULT_SEED, k: int = DEFAULT_K) -> list:
    ids = index.ids
    partners = partner_indices(ids, seed, k)
    return [(ids[i], ids[j]) for i in range(len(ids)) for j in partners[i]]


# -- hash store --------------------------------------------------------------

@dataclass(frozen=True)
class HashRecord:
    image_id: str
    variant: str
    algo: str
    bitlen: int
    hex: str

    @property
    def key(self):
        return self.image_id, self.variant, self.algo

    def bithash(self) -> BitHash:
        return BitHash.from_hex(self.algo, self.hex, self.bitlen)


class HashStore:
    """Hash records keyed on (image_id, variant, algo), persisted as TSV.

    Files are rewritten whole and sorted, so identical content gives
    identical bytes. Per-image failures live next to it in ``failures.tsv``.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._records = {}
        self._failures = {}
        self._lengths = {}
        if self.path is not None and self.path.exists():
            for rec in read_store_file(self.path):
                self.add(rec)
            fpath = self.failures_path
            if fpath.exists():
                with open(fpath, newline="") as fh:
                    for row in csv.DictReader(fh, delimiter="\t"):
                        self._failures[(row["image_id"], row["variant"])] = row["error"]

    @property
    def failures_path(self) -> Path:
        return self.path.with_name("failures.tsv")

    def __len__(self):
        return len(self._records)

    def __contains__(self, key):
        return key in self._records

    def records(self) -> list:
        return [self._records[k] for k in sorted(self._records)]

    def failures(self) -> dict:
        return dict(sorted(self._failures.items()))

    def add(self, rec: HashRecord) -> bool:
        """Insert ``rec``; False if that (image, variant, algo) is already stored."""
        declared = self._lengths.setdefault(rec.algo, rec.bitlen)
        if declared != rec.bitlen:
            raise LengthInconsistency(f"{rec.algo} hashes are {declared} bits, got {rec.bitlen} for {rec.image_id}")
        if rec.key in self._records:
            return False
        self._records[rec.key] = rec
        return True

    def add_failure(self, image_id: str, variant: str, error: str) -> None:
        self._failures[(image_id, variant)] = error

    def get(self, image_id: str, variant: str, algo: str) -> BitHash:
        return self._records[(image_id, variant, algo)].bithash()

    def failed(self, image_id: str, variant: str) -> bool:
        return (image_id, variant) in self._failures

    def algorithms(self) -> list:
        return sorted({k[2] for k in self._records})

    def variants(self) -> list:
        return sorted({k[1] for k in self._records})

    def save(self, path=None) -> None:
        path = Path(path) if path is not None else self.path
        write_store_file(path, self.records())
        with open(path.with_name("failures.tsv"), "w", newline="") as fh:
            w = csv.writer(fh, delimiter="\t", lineterminator="\n")
            w.writerow(FAILURE_COLUMNS)
            for (image_id, variant), err in sorted(self._failures.items()):
                w.writerow([image_id, variant, err])

    def matrix(self, ids: list, variant: str, algo: str):
        """Hashes of ``ids`` as (n, words) uint64 rows plus a presence mask."""
        length = self._lengths.get(algo)
        if length is None:
            raise MissingHashes(f"no {algo} hashes in the store")
        words = -(-length // 64)
        out = np.zeros((len(ids), words), dtype=np.uint64)
        present = np.zeros(len(ids), dtype=bool)
        for i, image_id in enumerate(ids):
            rec = self._records.get((image_id, variant, algo))
            if rec is None:
                continue
            v = int(rec.hex, 16)
            for w in range(words):
                out[i, words - 1 - w] = (v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
            present[i] = True
        return out, present, length


def write_store_file(path, records: Iterable[HashRecord]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\t".join(STORE_COLUMNS) + "\n")
        for r in records:
            fh.write(f"{r.image_id}\t{r.variant}\t{r.algo}\t{r.bitlen}\t{r.hex}\n")


def read_store_file(path) -> list:
    """Parse a hash-store file, checking every line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split("\t") != list(STORE_COLUMNS):
        raise FormatError(f"{path}: first line must be the header {' '.join(STORE_COLUMNS)}")
    lengths = {}
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(STORE_COLUMNS):
            raise FormatError(f"{path}:{n}: expected {len(STORE_COLUMNS)} tab-separated fields, got {len(parts)}")
        image_id, variant, algo, bitlen, hexval = parts
        try:
            bitlen = int(bitlen)
            int(hexval, 16)
        except ValueError:
            raise FormatError(f"{path}:{n}: bad bit length or hex value") from None
        if bitlen < 1 or len(hexval) != hex_width(bitlen) or not image_id or not algo:
            raise FormatError(f"{path}:{n}: {len(hexval)} hex digits do not encode {bitlen} bits")
        if int(hexval, 16) >> bitlen:
            raise FormatError(f"{path}:{n}: value exceeds {bitlen} bits")
        declared = lengths.setdefault(algo, ALGORITHM_BITS.get(algo, bitlen))
        if declared != bitlen:
            raise LengthInconsistency(f"{path}:{n}: {algo} declared with {bitlen} bits, expected {declared}")
        out.append(HashRecord(image_id, variant, algo, bitlen, hexval.lower()))
    return out


def import_external_hashes(path, store: HashStore) -> int:
    """Merge a hash-store file into ``store``; returns the number of new records."""
    records = read_store_file(path)
    for r in records:
        declared = store._lengths.get(r.algo, r.bitlen)
        if declared != r.bitlen:
            raise LengthInconsistency(f"{r.algo} hashes in the store are {declared} bits, file has {r.bitlen}")
    return sum(store.add(r) for r in records)


# -- manifest ----------------------------------------------------------------

@dataclass
class RunManifest:
    seed: int = DEFAULT_SEED
    k_neighbours: int = DEFAULT_K
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    modifications: list = field(default_factory=lambda: list(MODIFICATIONS))
    corpus_digest: str = ""
    n_images: int = 0
    dedup: bool = True
    overrides: dict = field(default_factory=dict)
    emulated: list = field(default_factory=list)
    notes: list = field(default_factory=lambda: [IN_MEMORY_NOTE])
    tool_version: str = __version__

    def __post_init__(self):
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise UnknownAlgorithm(f"unknown algorithm(s) {bad}; supported: {', '.join(ALGORITHMS)}")
        bad = [m for m in self.modifications if m not in MODIFICATIONS]
        if bad:
            raise UnknownModification(f"unknown modification(s) {bad}; supported: {', '.join(MODIFICATIONS)}")
        self.emulated = sorted(set(self.modifications) & EMULATED)

    def spec(self, kind: str) -> ModificationSpec:
        return ModificationSpec(kind, self.overrides.get(kind, {}))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise FormatError(f"cannot read manifest {path}: {exc}") from exc
        return cls(**data)


# -- hashing -----------------------------------------------------------------

@dataclass(frozen=True)
class _Job:
    image_id: str
    path: str
    variant: str
    algorithms: tuple
    spec: Optional[ModificationSpec]
    persist_dir: Optional[str]


def _hash_job(job: _Job):
    """Worker body: (records, error message or None)."""
    try:
        with open(job.path, "rb") as fh:
            img = decode_image(fh.read())
        if job.spec is not None and job.persist_dir is not None:
            img, data = apply_encoded(job.spec, img)
            dest = Path(job.persist_dir) / f"{job.image_id}.{job.variant}.{job.spec.extension}"
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_bytes(data)
        elif job.spec is not None:
            img = apply(job.spec, img)
        recs = []
        for algo in job.algorithms:
            h = hash_image(algo, img)
            recs.append(HashRecord(job.image_id, job.variant, algo, h.length, h.hex()))
        return recs, None
    except (PhashbenchError, OSError) as exc:
        return [], f"{type(exc).__name__}: {exc}"


@dataclass
class HashSummary:
    variant: str
    new_records: dict
    failures: list
    skipped: int = 0

    @property
    def total_new(self) -> int:
        return sum(self.new_records.values())


def hash_corpus(index: CorpusIndex, algorithms, variant: str, store: HashStore, *,
                manifest: Optional[RunManifest] = None, workers: int = 1,
                persist_dir=None) -> HashSummary:
    """Hash every image of ``index`` for ``variant`` with the missing algorithms.

    Images already hashed, or recorded as failed for this variant, are not
    touched again, so reruns add nothing. A failing image is logged and
    recorded; the batch carries on.
    """
    algorithms = list(algorithms)
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UnknownAlgorithm(f"unknown algorithm {a!r}; supported: {', '.join(ALGORITHMS)}")
    if variant not in VARIANTS:
        raise UnknownModification(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    spec = None
    if variant != ORIGINAL:
        spec = (manifest or RunManifest()).spec(variant)
    jobs = []
    skipped = 0
    for e in index.entries:
        todo = tuple(a for a in algorithms if (e.image_id, variant, a) not in store)
        if not todo or store.failed(e.image_id, variant):
            skipped += 1
            continue
        jobs.append(_Job(e.image_id, str(e.path), variant, todo, spec,
                         None if persist_dir is None else str(persist_dir)))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_hash_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_hash_job(j) for j in jobs]

    new = {a: 0 for a in algorithms}
    failures = []
    for job, (recs, err) in zip(jobs, results):
        if err is not None:
            log.warning("%s (%s): %s", job.image_id, variant, err)
            store.add_failure(job.image_id, variant, err)
            failures.append((job.image_id, err))
            continue
        for r in recs:
            new[r.algo] += store.add(r)
    return HashSummary(variant, new, failures, skipped)


# -- experiments -------------------------------------------------------------

def _popcount_rows(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).sum(axis=1, dtype=np.int64)


@dataclass
class ExperimentResult:
    """Per-algorithm lattice counts of one experiment."""

    kind: str  # "inter" or "intra"
    variant: str
    counts: dict  # algo -> LatticeCounts
    skipped: dict  # algo -> comparisons dropped because an image failed

    def stats(self) -> dict:
        return {a: c.stats() for a, c in sorted(self.counts.items())}


def _check_hashed(store: HashStore, ids, variant, algo):
    missing = [i for i in ids if (i, variant, algo) not in store and not store.failed(i, variant)]
    if missing:
        raise MissingHashes(
            f"{len(missing)} image(s) have no {algo} hash for variant {variant!r} "
            f"(first: {missing[0]}); run the hash/modify step first"
        )


def _spill(path, rows) -> None:
    with gzip.open(path, "at", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in rows:
            w.writerow(row)


def run_inter(store: HashStore, index: CorpusIndex, manifest: RunManifest, variant: str = ORIGINAL,
              spill=None, algorithms=None) -> ExperimentResult:
    """Distances between each image and its k sampled partners, within one variant.

    Pairs touching an image whose hashing failed are skipped and counted.
    """
    ids = index.ids
    partners = partner_indices(ids, manifest.seed, manifest.k_neighbours)
    a_idx = np.repeat(np.arange(len(ids)), manifest.k_neighbours)
    b_idx = partners.ravel()
    counts, skipped = {}, {}
    for algo in algorithms or manifest.algorithms:
        _check_hashed(store, ids, variant, algo)
        mat, present, length = store.matrix(ids, variant, algo)
        ok = present[a_idx] & present[b_idx]
        bits = _popcount_rows(mat[a_idx[ok]] ^ mat[b_idx[ok]])
        counts[algo] = LatticeCounts.from_bits(length, bits)
        skipped[algo] = int((~ok).sum())
        if spill is not None:
            _spill(spill, ((ids[i], ids[j], algo, variant, int(d), length)
                           for i, j, d in zip(a_idx[ok], b_idx[ok], bits)))
    return ExperimentResult("inter", variant, counts, skipped)


def run_intra(store: HashStore, index: CorpusIndex, manifest: RunManifest, modification: str,
              spill=None, algorithms=None) -> ExperimentResult:
    """Distance between each original and its modified version.

    ``modification="original"`` compares the originals with themselves, the
    unmodified-copy control. ``algorithms`` defaults to the manifest's list
    and may name imported external tags.
    """
    if modification not in VARIANTS:
        raise UnknownModification(f"unknown modification {modification!r}")
    ids = index.ids
    counts, skipped = {}, {}
    for algo in algorithms or manifest.algorithms:
        _check_hashed(store, ids, ORIGINAL, algo)
        _check_hashed(store, ids, modification, algo)
        orig, p0, length = store.matrix(ids, ORIGINAL, algo)
        mod, p1, _ = store.matrix(ids, modification, algo)
        ok = p0 & p1
        bits = _popcount_rows(orig[ok] ^ mod[ok])
        counts[algo] = LatticeCounts.from_bits(length, bits)
        skipped[algo] = int((~ok).sum())
        if spill is not None:
            kept = [i for i, flag in zip(ids, ok) if flag]
            _spill(spill, ((i, i, algo, modification, int(d), length) for i, d in zip(kept, bits)))
    return ExperimentResult("intra", modification, counts, skipped)


def stats_rows(result: ExperimentResult) -> list:
    """CSV rows: algo, modification, n, mean, median, stdev, min, max, exact_match_pct."""
    return [[algo, result.variant] + st.row() for algo, st in result.stats().items()]


STATS_HEADER = ["algo", "modification", "n", "mean", "median", "stdev", "min", "max", "exact_match_pct"]


def dist_stats_from_row(row: dict) -> DistStats:
    return DistStats(int(row["n"]), float(row["mean"]), float(row["median"]), float(row["stdev"]),
                     float(row["min"]), float(row["max"]), float(row["exact_match_pct"]) / 100)
