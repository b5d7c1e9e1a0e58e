"""Hamming distances and the statistics built on them.

Distances between two L-bit hashes live on the lattice {0, 1/L, ..., 1}.
Large experiments therefore keep integer counts per lattice point
(``LatticeCounts``) instead of float samples: merging partial results is
exact addition, and mean, median, spread and histograms all follow from
the counts.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (AlgorithmMismatch, DegenerateSample, EmptySample, InsufficientSample,
                     LengthMismatch, MixedAlgorithms)
from .hashalgos import BitHash

_EPS = 1e-12


def hamming_count(a: BitHash, b: BitHash) -> int:
    if a.length != b.length:
        raise LengthMismatch(f"cannot compare {a.length}-bit and {b.length}-bit hashes")
    if a.algo != b.algo:
        raise AlgorithmMismatch(f"cannot compare {a.algo} with {b.algo}")
    return (a.value ^ b.value).bit_count()


def hamming_norm(a: BitHash, b: BitHash) -> float:
    """popcount(a XOR b) / length."""
    return hamming_count(a, b) / a.length


@dataclass(frozen=True)
class ComparisonRecord:
    id_a: str
    id_b: str
    algo: str
    differing_bits: int
    length: int
    modification: Optional[str] = None

    @property
    def distance(self) -> float:
        return self.differing_bits / self.length


@dataclass(frozen=True)
class DistStats:
    n: int
    mean: float
    median: float
    stdev: float
    min: float
    max: float
    exact_match_frac: float

    def row(self) -> list:
        """Fixed four-decimal rendering used in the CSV reports."""
        return [self.n] + [f"{v:.4f}" for v in (self.mean, self.median, self.stdev, self.min, self.max)] + [
            f"{100 * self.exact_match_frac:.4f}"
        ]


def dist_stats(sample: Sequence[float]) -> DistStats:
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 2:
        raise InsufficientSample(f"need at least 2 distances, got {x.size}")
    return DistStats(
        n=int(x.size),
        mean=float(x.mean()),
        median=float(np.median(x)),
        stdev=float(x.std(ddof=1)),
        min=float(x.min()),
        max=float(x.max()),
        exact_match_frac=float(np.count_nonzero(x == 0) / x.size),
    )


class LatticeCounts:
    """Mergeable count of distances k/length for k = 0..length."""

    def __init__(self, length: int, counts=None):
        self.length = int(length)
        if counts is None:
            counts = np.zeros(self.length + 1, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        if self.counts.shape != (self.length + 1,):
            raise ValueError("counts must have length + 1 entries")

    @classmethod
    def from_bits(cls, length: int, differing_bits: Iterable[int]) -> "LatticeCounts":
        k = np.asarray(list(differing_bits) if not isinstance(differing_bits, np.ndarray) else differing_bits,
                       dtype=np.int64)
        return cls(length, np.bincount(k, minlength=length + 1))

    def __add__(self, other: "LatticeCounts") -> "LatticeCounts":
        if other.length != self.length:
            raise LengthMismatch("cannot merge counts for different hash lengths")
        return LatticeCounts(self.length, self.counts + other.counts)

    def __eq__(self, other):
        return (isinstance(other, LatticeCounts) and other.length == self.length
                and np.array_equal(other.counts, self.counts))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def _kth(self, k: int) -> int:
        """k-th smallest differing-bit count (0-based)."""
        return int(np.searchsorted(np.cumsum(self.counts), k, side="right"))

    def stats(self) -> DistStats:
        n = self.n
        if n < 2:
            raise InsufficientSample(f"need at least 2 distances, got {n}")
        k = np.arange(self.length + 1)
        # integer moments: exact regardless of sample size
        s1 = int((self.counts * k).sum())
        s2 = int((self.counts * k * k).sum())
        L = self.length
        var = (n * s2 - s1 * s1) / (n * (n - 1)) / (L * L)
        med = (self._kth((n - 1) // 2) + self._kth(n // 2)) / 2
        nz = np.flatnonzero(self.counts)
        return DistStats(
            n=n,
            mean=s1 / n / L,
            median=med / L,
            stdev=math.sqrt(max(var, 0.0)),
            min=nz[0] / L,
            max=nz[-1] / L,
            exact_match_frac=int(self.counts[0]) / n,
        )

    def expand(self) -> np.ndarray:
        """Sorted float sample equivalent to these counts."""
        return np.repeat(np.arange(self.length + 1), self.counts) / self.length


@dataclass(frozen=True)
class EquivalenceReport:
    """Groups of images sharing an identical hash, largest first."""

    classes: tuple

    @property
    def sizes(self) -> list:
        return [len(c) for c in self.classes]

    @property
    def n_images(self) -> int:
        return sum(self.sizes)

    def n_larger_than(self, threshold: int) -> int:
        return sum(1 for s in self.sizes if s > threshold)

    def samples(self, threshold: int, k: int = 5) -> list:
        return [list(c[:k]) for c in self.classes if len(c) > threshold]


def equivalence_classes(hashes: Iterable[tuple]) -> EquivalenceReport:
    groups = defaultdict(list)
    algo = None
    for image_id, h in hashes:
        key = (h.algo, h.length)
        if algo is None:
            algo = key
        elif key != algo:
            raise MixedAlgorithms(f"got both {algo[0]} and {key[0]} hashes")
        groups[h.value].append(image_id)
    classes = [tuple(sorted(members)) for members in groups.values()]
    classes.sort(key=lambda c: (-len(c), c[0]))
    return EquivalenceReport(tuple(classes))


@dataclass(frozen=True)
class HistogramSeries:
    bit_length: int
    centres: np.ndarray
    edges: np.ndarray
    counts: np.ndarray
    npdf: np.ndarray
    mean: float
    stdev: float

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def normal_pdf(x, mean: float, stdev: float):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-((x - mean) ** 2) / (2 * stdev * stdev)) / (stdev * math.sqrt(2 * math.pi))


def histogram_from_counts(lattice: LatticeCounts) -> HistogramSeries:
    st = lattice.stats()
    if st.stdev == 0:
        raise DegenerateSample("all distances are equal; the normal overlay is undefined")
    nz = np.flatnonzero(lattice.counts)
    k = np.arange(nz[0], nz[-1] + 1)
    L = lattice.length
    centres = k / L
    return HistogramSeries(
        bit_length=L,
        centres=centres,
        edges=np.append((k - 0.5) / L, (k[-1] + 0.5) / L),
        counts=lattice.counts[k].copy(),
        npdf=normal_pdf(centres, st.mean, st.stdev),
        mean=st.mean,
        stdev=st.stdev,
    )


def histogram_npdf(sample: Sequence[float], bit_length: int) -> HistogramSeries:
    """Histogram with one bin per lattice point, plus the fitted normal density."""
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 2:
        raise InsufficientSample(f"need at least 2 distances, got {x.size}")
    k = np.rint(x * bit_length).astype(np.int64)
    return histogram_from_counts(LatticeCounts.from_bits(bit_length, k))


@dataclass(frozen=True)
class ThresholdRate:
    threshold: float
    false_positive_rate: float
    false_negative_rate: float


def threshold_rates(inter: Sequence[float], intra: Sequence[float],
                    thresholds: Sequence[float]) -> list:
    """FPR(t) = share of unrelated pairs at distance <= t; FNR(t) = share of variants above t."""
    inter = np.sort(np.asarray(inter, dtype=np.float64))
    intra = np.sort(np.asarray(intra, dtype=np.float64))
    if inter.size == 0 or intra.size == 0:
        raise EmptySample("threshold rates need non-empty inter and intra samples")
    out = []
    for t in thresholds:
        fp = np.searchsorted(inter, t + _EPS, side="right") / inter.size
        fn = 1.0 - np.searchsorted(intra, t + _EPS, side="right") / intra.size
        out.append(ThresholdRate(float(t), float(fp), float(fn)))
    return out


def lattice_thresholds(bit_length: int) -> np.ndarray:
    return np.arange(bit_length + 1) / bit_length
