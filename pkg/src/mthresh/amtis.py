"""AMTIS: multilevel thresholds picked from sampled histogram valleys.

The pipeline builds the histogram, collects valley levels and per-partition
minimum levels, keeps the levels found by both scans and reduces that
candidate list to ``t`` thresholds by a contiguous grouping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientCandidates
from .histogram import candidate_sets, check_partition_count, compute_histogram

FALLBACK_POLICIES = ("error", "use_set_a")


@dataclass(frozen=True)
class AmtisConfig:
    """Settings for :func:`amtis_thresholds`.

    Attributes
    ----------
    partitions : int
        Number of equal-width histogram partitions; must divide 256.
    fallback : {"error", "use_set_a"}
        What to do when the candidate set is smaller than ``t``:
        raise, or retry the selection on the full valley set.
    first_in_last_group : bool
        Take the first candidate of the last group instead of the one
        following its mean.
    """

    partitions: int = 32
    fallback: str = "error"
    first_in_last_group: bool = False

    def __post_init__(self):
        check_partition_count(self.partitions)
        if self.fallback not in FALLBACK_POLICIES:
            raise ValueError(f"fallback must be one of {FALLBACK_POLICIES}, got {self.fallback!r}")


def select_thresholds(candidates: Sequence[int], t: int,
                      first_in_last_group: bool = False) -> tuple:
    """Reduce an ascending candidate list to ``t`` thresholds.

    The list is cut into ``t`` contiguous groups whose sizes differ by at most
    one (earlier groups take the extra elements). Each group contributes its
    smallest member not below the group mean.
    """
    if t < 1:
        raise ValueError(f"threshold count must be >= 1, got {t}")
    cand = np.asarray(candidates, dtype=np.int64)
    if cand.size < t:
        raise InsufficientCandidates(int(cand.size), t)
    groups = np.array_split(cand, t)
    chosen = []
    for k, group in enumerate(groups):
        if first_in_last_group and k == t - 1:
            chosen.append(int(group[0]))
            continue
        mean = group.mean()
        above = group[group >= mean]
        chosen.append(int(above[0]) if above.size else int(group[-1]))
    assert all(b > a for a, b in zip(chosen, chosen[1:])), chosen
    return tuple(chosen)


def amtis_from_histogram(h, t: int, cfg: AmtisConfig | None = None) -> tuple:
    cfg = cfg or AmtisConfig()
    if t < 1:
        raise ValueError(f"threshold count must be >= 1, got {t}")
    sets = candidate_sets(h, cfg.partitions)
    try:
        return select_thresholds(sets.set_c, t, cfg.first_in_last_group)
    except InsufficientCandidates:
        if cfg.fallback != "use_set_a":
            raise
    return select_thresholds(sets.set_a, t, cfg.first_in_last_group)


def amtis_thresholds(img, t: int, cfg: AmtisConfig | None = None) -> tuple:
    """Compute ``t`` AMTIS thresholds for a gray image.

    Parameters
    ----------
    img : array_like
        2-D uint8 gray image.
    t : int
        Number of thresholds.
    cfg : AmtisConfig, optional
        Defaults to 32 partitions and no fallback.

    Returns
    -------
    tuple of int
        ``t`` strictly increasing levels, each a histogram valley.

    Raises
    ------
    InsufficientCandidates
        When fewer than ``t`` candidate levels exist.
    """
    return amtis_from_histogram(compute_histogram(img), t, cfg)

