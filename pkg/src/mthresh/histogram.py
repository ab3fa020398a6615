"""Gray-level histograms and the AMTIS candidate-level scans.

``find_valleys`` and ``partition_minima`` produce the two candidate sets whose
intersection feeds threshold selection in :mod:`mthresh.amtis`.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import EmptyImage, InvalidPartitionCount
from .imagecore import LEVELS, as_gray


@dataclass(frozen=True)
class Histogram:
    """Per-level pixel counts of an 8-bit gray image."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1:
            raise ValueError("histogram counts must be 1-D")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be nonnegative")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __len__(self):
        return len(self.counts)


@dataclass(frozen=True)
class CandidateSets:
    """Valleys (``set_a``), partition minima (``set_b``) and their intersection."""

    set_a: tuple
    set_b: tuple
    set_c: tuple


def _counts(h) -> np.ndarray:
    return h.counts if isinstance(h, Histogram) else np.asarray(h)


def compute_histogram(img) -> Histogram:
    gray = as_gray(img)
    return Histogram(np.bincount(gray.ravel(), minlength=LEVELS))


def normalize(h) -> np.ndarray:
    """Return ``counts / total`` as float64 frequencies."""
    counts = _counts(h)
    total = counts.sum()
    if total <= 0:
        raise EmptyImage("cannot normalize an empty histogram")
    return counts / total


def find_valleys(h) -> tuple:
    """Levels that are discrete local minima of the histogram.

    Flat runs of equal counts are treated as one point located at the run's
    lowest level. A run is a valley when the nearest different count on each
    side is larger; runs touching either end of the histogram never qualify.
    Empty bins take part like any other count.

    Returns
    -------
    tuple of int
        Ascending valley levels (possibly empty).
    """
    c = _counts(h)
    if len(c) < 3:
        return ()
    change = np.flatnonzero(np.diff(c)) + 1
    starts = np.concatenate(([0], change))
    values = c[starts]
    # interior runs only; endpoints have no neighbor on one side
    lower_than_left = values[1:-1] < values[:-2]
    lower_than_right = values[1:-1] < values[2:]
    keep = np.flatnonzero(lower_than_left & lower_than_right) + 1
    return tuple(int(x) for x in starts[keep])


def check_partition_count(r: int, levels: int = LEVELS) -> None:
    if r <= 1 or levels % r != 0:
        raise InvalidPartitionCount(
            f"partition count must divide {levels} and exceed 1, got {r}"
        )


def partition_minima(h, r: int = 32) -> tuple:
    """Lowest-count level in each of ``r`` equal-width partitions.

    Ties resolve to the lowest level in the partition.
    """
    c = _counts(h)
    check_partition_count(r, len(c))
    blocks = c.reshape(r, len(c) // r)
    offsets = np.arange(r) * blocks.shape[1]
    return tuple(int(x) for x in offsets + blocks.argmin(axis=1))


def intersect_candidates(set_a: Iterable[int], set_b: Iterable[int]) -> tuple:
    common = np.intersect1d(np.asarray(list(set_a), dtype=np.int64),
                            np.asarray(list(set_b), dtype=np.int64))
    return tuple(int(x) for x in common)


def candidate_sets(h, r: int = 32) -> CandidateSets:
    set_a = find_valleys(h)
    set_b = partition_minima(h, r)
    return CandidateSets(set_a, set_b, intersect_candidates(set_a, set_b))


def write_histogram_csv(path, h, thresholds: Iterable[int] | None = None) -> Path:
    """Write one ``level,count`` row per level.

    When ``thresholds`` is given (even empty) an ``is_threshold`` 0/1 column
    is appended.
    """
    path = Path(path)
    c = _counts(h)
    header = ["level", "count"]
    marks = None
    if thresholds is not None:
        marks = set(int(x) for x in thresholds)
        header.append("is_threshold")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for level, count in enumerate(c):
            row = [level, int(count)]
            if marks is not None:
                row.append(int(level in marks))
            writer.writerow(row)
    return path
