"""Classical histogram-based multilevel threshold optimizers.

Otsu (between-class variance), Kapur (sum of class entropies) and minimum
cross-entropy (MCET). Thresholds follow the half-open class convention: a
threshold set ``(th_1, ..., th_t)`` splits the levels into classes
``[0, th_1), [th_1, th_2), ..., [th_t, L)``, so every ``th_k`` lies in
``[1, L-1]``.

Each optimizer reduces to a table ``cost[a, b]`` holding the contribution of a
class spanning ``[a, b)``; the search then maximizes a sum of class costs
either by enumerating every threshold set or by dynamic programming. Both
searches fold the sum from the right, so equal threshold sets always produce
bit-identical totals and ties resolve to the lexicographically smallest set.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHistogram, UndefinedObjective
from .histogram import Histogram, normalize

SEARCHES = ("auto", "exhaustive", "dp")


def _freqs(nh) -> np.ndarray:
    if isinstance(nh, Histogram):
        return normalize(nh)
    p = np.asarray(nh, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("histogram must be 1-D with at least two levels")
    if np.any(p < 0):
        raise ValueError("histogram frequencies must be nonnegative")
    return p


def _bounds(t_set, levels: int) -> list:
    ths = [int(x) for x in np.atleast_1d(t_set)]
    if not ths:
        raise ValueError("threshold set is empty")
    if any(b <= a for a, b in zip(ths, ths[1:])):
        raise ValueError(f"thresholds must be strictly increasing: {ths}")
    if ths[0] < 1 or ths[-1] > levels - 1:
        raise ValueError(f"thresholds must lie in [1, {levels - 1}]: {ths}")
    return [0, *ths, levels]


@dataclass(frozen=True)
class MomentTables:
    """Prefix sums of ``h(i)`` and ``i*h(i)``, each of length ``L + 1``."""

    cum0: np.ndarray
    cum1: np.ndarray

    def m0(self, a, b):
        return self.cum0[b] - self.cum0[a]

    def m1(self, a, b):
        return self.cum1[b] - self.cum1[a]


def moment_tables(nh) -> MomentTables:
    p = _freqs(nh)
    zero = np.zeros(1)
    cum0 = np.concatenate((zero, np.cumsum(p)))
    cum1 = np.concatenate((zero, np.cumsum(np.arange(p.size) * p)))
    cum0.setflags(write=False)
    cum1.setflags(write=False)
    return MomentTables(cum0, cum1)


# --- objectives, evaluated directly from their definitions ------------------

def otsu_objective(nh, t_set) -> float:
    """Between-class variance ``sum_k w_k (mu_k - mu_T)^2`` (maximized).

    Empty classes contribute nothing.
    """
    p = _freqs(nh)
    levels = np.arange(p.size)
    mu_t = float(np.sum(levels * p)) / float(np.sum(p))
    total = 0.0
    bounds = _bounds(t_set, p.size)
    for a, b in zip(bounds, bounds[1:]):
        w = p[a:b].sum()
        if w > 0:
            mu = np.sum(levels[a:b] * p[a:b]) / w
            total += w * (mu - mu_t) ** 2
    return float(total)


def otsu_within_variance(nh, t_set) -> float:
    """Weighted within-class variance ``sum_k w_k var_k``."""
    p = _freqs(nh)
    levels = np.arange(p.size)
    total = 0.0
    bounds = _bounds(t_set, p.size)
    for a, b in zip(bounds, bounds[1:]):
        w = p[a:b].sum()
        if w > 0:
            mu = np.sum(levels[a:b] * p[a:b]) / w
            total += np.sum(p[a:b] * (levels[a:b] - mu) ** 2)
    return float(total)


def kapur_objective(nh, t_set) -> float:
    """Sum of per-class Shannon entropies in nats (maximized).

    ``0 ln 0`` is taken as 0 and empty classes contribute nothing.
    """
    p = _freqs(nh)
    total = 0.0
    bounds = _bounds(t_set, p.size)
    for a, b in zip(bounds, bounds[1:]):
        cls = p[a:b]
        w = cls.sum()
        if w <= 0:
            continue
        q = cls[cls > 0] / w
        total -= np.sum(q * np.log(q))
    return float(total)


def mcet_direct(nh, th: int) -> float:
    """Two-class sum ``sum_i i h(i) ln(class mean)`` evaluated term by term.

    Raises
    ------
    UndefinedObjective
        If either class carries no mass.
    """
    p = _freqs(nh)
    a, th, b = _bounds(th, p.size)
    total = 0.0
    for lo, hi in ((a, th), (th, b)):
        idx = np.arange(lo, hi)
        mass = np.sum(p[lo:hi])
        if mass <= 0:
            raise UndefinedObjective(f"class [{lo}, {hi}) has zero mass")
        first = np.sum(idx * p[lo:hi])
        if first == 0:
            continue
        log_mean = np.log(first / mass)
        for i in idx:
            if p[i] > 0:
                total += i * p[i] * log_mean
    return float(total)


def mcet_recursive(nh, t_set, moments: MomentTables | None = None) -> float:
    """``sum_k m1_k ln(m1_k / m0_k)`` over classes, from prefix moments.

    Each class costs O(1). ``m1 = 0`` (a class holding only level 0) counts
    as 0.
    """
    p = _freqs(nh)
    mt = moments or moment_tables(p)
    total = 0.0
    bounds = _bounds(t_set, p.size)
    for a, b in zip(bounds, bounds[1:]):
        m0 = mt.m0(a, b)
        m1 = mt.m1(a, b)
        if m0 <= 0:
            raise UndefinedObjective(f"class [{a}, {b}) has zero mass")
        if m1 > 0:
            total += m1 * np.log(m1 / m0)
    return float(total)


def mcet_cross_entropy(nh, t_set) -> float:
    """Cross entropy between the histogram and its class-mean reconstruction.

    Equals ``sum_i i h(i) ln i`` minus :func:`mcet_recursive`; this is the
    quantity :func:`mcet_thresholds` minimizes.
    """
    p = _freqs(nh)
    i = np.arange(1, p.size)
    const = float(np.sum(i * p[1:] * np.log(i)))
    return const - mcet_recursive(p, t_set)


# --- per-class cost tables --------------------------------------------------

@functools.lru_cache(maxsize=8)
def _lower_mask(n):
    # cost[a, b] is meaningful only for a < b
    mask = np.tril(np.ones((n, n), dtype=bool))
    mask.setflags(write=False)
    return mask


def _pair_grids(cum):
    return cum[None, :] - cum[:, None]


def otsu_cost_table(nh) -> np.ndarray:
    """``cost[a, b] = m1^2 / m0``; sums to between-class variance + mu_T^2."""
    mt = moment_tables(nh)
    m0 = _pair_grids(mt.cum0)
    m1 = _pair_grids(mt.cum1)
    cost = np.zeros_like(m0)
    np.divide(m1 * m1, m0, out=cost, where=m0 > 0)
    cost[_lower_mask(len(cost))] = -np.inf
    return cost


def kapur_cost_table(nh) -> np.ndarray:
    """``cost[a, b] = ln m0 - (sum p ln p) / m0``, the entropy of class [a, b)."""
    p = _freqs(nh)
    mt = moment_tables(p)
    plogp = np.zeros_like(p)
    pos = p > 0
    plogp[pos] = p[pos] * np.log(p[pos])
    cum_plogp = np.concatenate((np.zeros(1), np.cumsum(plogp)))
    m0 = _pair_grids(mt.cum0)
    s = _pair_grids(cum_plogp)
    filled = m0 > 0
    cost = np.zeros_like(m0)
    np.log(m0, out=cost, where=filled)
    ratio = np.zeros_like(m0)
    np.divide(s, m0, out=ratio, where=filled)
    cost -= ratio
    cost[_lower_mask(len(cost))] = -np.inf
    return cost


def mcet_cost_table(nh) -> np.ndarray:
    """``cost[a, b] = m1 ln(m1 / m0)``; zero-mass classes are infeasible (-inf)."""
    mt = moment_tables(nh)
    m0 = _pair_grids(mt.cum0)
    m1 = _pair_grids(mt.cum1)
    used = m1 > 0
    cost = np.zeros_like(m0)
    np.divide(m1, m0, out=cost, where=used)
    np.log(cost, out=cost, where=used)
    cost *= m1
    cost[m0 <= 0] = -np.inf
    cost[_lower_mask(len(cost))] = -np.inf
    return cost


# --- searches ---------------------------------------------------------------

def _require_feasible(value, t):
    if not np.isfinite(value):
        raise DegenerateHistogram(f"no feasible placement of {t} threshold(s)")


def exhaustive_search(cost: np.ndarray, t: int):
    """Maximize ``sum_k cost[b_k, b_{k+1}]`` over every threshold set.

    Enumerates all ``C(L-1, t)`` sets (the last two thresholds vectorized).
    Returns ``(thresholds, value)``; ties go to the lexicographically smallest
    set.
    """
    n = cost.shape[0]
    levels = n - 1
    if t < 1 or t > levels - 1:
        raise DegenerateHistogram(f"cannot place {t} threshold(s) in {levels} levels")
    last = cost[:, levels]
    if t == 1:
        total = cost[0] + last
        j = int(np.argmax(total))
        _require_feasible(total[j], t)
        return (j,), float(total[j])

    tail2 = cost + last[None, :]
    best_value = -np.inf
    best = None
    for prefix in itertools.combinations(range(1, levels), t - 2):
        start = prefix[-1] if prefix else 0
        total = cost[start][:, None] + tail2
        chain = (0, *prefix)
        for q, r in zip(reversed(chain[:-1]), reversed(chain[1:])):
            total = cost[q, r] + total
        flat = int(np.argmax(total))
        if total.flat[flat] > best_value:
            best_value = total.flat[flat]
            best = (*prefix, *divmod(flat, n))
    _require_feasible(best_value, t)
    return tuple(int(x) for x in best), float(best_value)


def dp_search(cost: np.ndarray, t: int):
    """Dynamic-programming maximization of the same objective.

    ``best[k][a]`` is the best total for covering ``[a, L)`` with ``k``
    classes; each layer costs O(L^2), O(t L^2) overall.
    """
    n = cost.shape[0]
    levels = n - 1
    if t < 1 or t > levels - 1:
        raise DegenerateHistogram(f"cannot place {t} threshold(s) in {levels} levels")
    best = cost[:, levels].copy()
    rows = np.arange(n)
    back = []
    for _ in range(t - 1):
        total = cost + best[None, :]
        arg = np.argmax(total, axis=1)
        best = total[rows, arg]
        back.append(arg)
    total = cost[0] + best
    first = int(np.argmax(total))
    _require_feasible(total[first], t)
    ths = [first]
    for arg in reversed(back):
        ths.append(int(arg[ths[-1]]))
    return tuple(ths), float(total[first])


def _optimize(cost_table, nh, t, search):
    if search not in SEARCHES:
        raise ValueError(f"search must be one of {SEARCHES}, got {search!r}")
    if t < 1:
        raise ValueError(f"threshold count must be >= 1, got {t}")
    p = _freqs(nh)
    nonempty = int(np.count_nonzero(p))
    if nonempty < t + 1:
        raise DegenerateHistogram(
            f"{nonempty} nonempty bin(s) cannot form {t + 1} classes"
        )
    cost = cost_table(p)
    if search == "auto":
        search = "exhaustive" if t <= 2 else "dp"
    fn = exhaustive_search if search == "exhaustive" else dp_search
    return fn(cost, t)[0]


def otsu_thresholds(nh, t: int, search: str = "auto") -> tuple:
    """Thresholds maximizing the between-class variance.

    Parameters
    ----------
    nh : array_like or Histogram
        Normalized histogram (raw counts give the same thresholds).
    t : int
        Number of thresholds.
    search : {"auto", "exhaustive", "dp"}
        ``"auto"`` enumerates for ``t <= 2`` and uses dynamic programming
        beyond.

    Raises
    ------
    DegenerateHistogram
        If fewer than ``t + 1`` bins are nonempty.
    """
    return _optimize(otsu_cost_table, nh, t, search)


def kapur_thresholds(nh, t: int, search: str = "auto") -> tuple:
    """Thresholds maximizing the summed class entropies; see :func:`otsu_thresholds`."""
    return _optimize(kapur_cost_table, nh, t, search)


def mcet_thresholds(nh, t: int, search: str = "auto") -> tuple:
    """Thresholds minimizing the cross entropy (every class must carry mass).

    Minimizing :func:`mcet_cross_entropy` is the same as maximizing
    :func:`mcet_recursive`, which is what the search does.
    """
    return _optimize(mcet_cost_table, nh, t, search)
