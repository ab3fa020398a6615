import math

import numpy as np
import pytest

from oracles import brute_force, random_histograms
from mthresh.baselines import (
    dp_search,
    exhaustive_search,
    kapur_cost_table,
    kapur_objective,
    kapur_thresholds,
    mcet_cost_table,
    mcet_cross_entropy,
    mcet_direct,
    mcet_recursive,
    mcet_thresholds,
    moment_tables,
    otsu_cost_table,
    otsu_objective,
    otsu_thresholds,
    otsu_within_variance,
)
from mthresh.errors import DegenerateHistogram, UndefinedObjective
from mthresh.histogram import normalize

TABLES = {"otsu": otsu_cost_table, "kapur": kapur_cost_table, "mcet": mcet_cost_table}
OPTIMIZERS = {"otsu": otsu_thresholds, "kapur": kapur_thresholds, "mcet": mcet_thresholds}


def two_spikes(levels=256):
    c = np.zeros(levels)
    c[50] = c[200] = 1
    return c / 2


def otsu_two_class(p, th):
    i = np.arange(p.size)
    w0, w1 = p[:th].sum(), p[th:].sum()
    mu0 = (i[:th] * p[:th]).sum() / w0
    mu1 = (i[th:] * p[th:]).sum() / w1
    return w0 * w1 * (mu0 - mu1) ** 2


def kapur_oracle(p, ths):
    bounds = [0, *ths, len(p)]
    total = 0.0
    for a, b in zip(bounds, bounds[1:]):
        w = math.fsum(p[a:b])
        for v in p[a:b]:
            if v > 0:
                total -= (v / w) * math.log(v / w)
    return total


def test_otsu_spike_example():
    p = two_spikes()
    assert otsu_objective(p, [100]) == pytest.approx(5625, rel=1e-12)
    assert otsu_thresholds(p, 1) == (51,)
    assert otsu_objective(np.eye(1, 256, 90)[0], [10, 200]) == 0


def test_otsu_matches_two_class_formula():
    for h in random_histograms(20, seed=11, positive=True):
        p = normalize(h)
        for th in (1, 40, 128, 255):
            assert otsu_objective(p, [th]) == pytest.approx(otsu_two_class(p, th), rel=1e-9)


def test_otsu_variance_decomposition():
    i = np.arange(256)
    for k, h in enumerate(random_histograms(30, seed=12)):
        p = normalize(h)
        mu = (i * p).sum()
        total = (p * (i - mu) ** 2).sum()
        ths = sorted(np.random.default_rng(k).choice(np.arange(1, 256), 3, replace=False))
        assert otsu_objective(p, ths) + otsu_within_variance(p, ths) == pytest.approx(total, rel=1e-9)


def test_uniform_histogram_examples():
    p = np.full(256, 1 / 256)
    assert otsu_thresholds(p, 1) == (128,)
    assert kapur_thresholds(p, 1) == (128,)
    assert kapur_objective(p, [128]) == pytest.approx(2 * math.log(128), rel=1e-12)
    assert kapur_objective(p, [128]) == pytest.approx(9.7041, abs=1e-4)
    # otsu brute force over the direct objective agrees
    best, winners = brute_force(lambda ths: otsu_objective(p, ths), 256, 1)
    assert winners[0] == (128,)


def test_kapur_examples():
    single = np.eye(1, 256, 77)[0]
    assert kapur_objective(single, [10]) == 0
    assert kapur_objective(single, [10, 100]) == 0
    with pytest.raises(DegenerateHistogram):
        kapur_thresholds(single, 1)
    for h in random_histograms(20, seed=13):
        p = normalize(h)
        assert kapur_objective(p, [30, 170]) == pytest.approx(kapur_oracle(p, [30, 170]), rel=1e-9)


def test_mcet_closed_forms():
    p = np.full(256, 1 / 256)
    # classes [0,128) and [128,256): m0 = 0.5 each, m1 = 31.75 and 95.75
    want = 31.75 * math.log(63.5) + 95.75 * math.log(191.5)
    assert mcet_recursive(p, [128]) == pytest.approx(want, rel=1e-12)
    assert mcet_direct(p, 128) == pytest.approx(want, rel=1e-12)
    with pytest.raises(UndefinedObjective):
        mcet_direct(np.eye(1, 256, 200)[0], 100)
    with pytest.raises(UndefinedObjective):
        mcet_recursive(np.eye(1, 256, 200)[0], [100, 150])


def test_mcet_recursive_equals_direct_everywhere():
    for h in random_histograms(10, seed=14, positive=True):
        p = normalize(h)
        mt = moment_tables(p)
        for th in range(1, 256):
            d, r = mcet_direct(p, th), mcet_recursive(p, [th], mt)
            assert abs(d - r) <= 1e-9 * abs(d)


def test_mcet_thresholds_minimize_cross_entropy():
    p = two_spikes()
    assert mcet_thresholds(p, 1) == (51,)
    u = np.full(256, 1 / 256)
    (th,) = mcet_thresholds(u, 1)
    best, winners = brute_force(lambda ths: mcet_cross_entropy(u, ths), 256, 1, maximize=False)
    assert (th,) in winners
    # the minimizer of cross entropy is the maximizer of the moment form
    best_direct = max(mcet_direct(u, k) for k in range(1, 256))
    assert mcet_direct(u, th) == pytest.approx(best_direct, rel=1e-12)


def test_moment_identities():
    for h in random_histograms(5, seed=15):
        p = normalize(h)
        mt = moment_tables(p)
        i = np.arange(256)
        for a in range(0, 257, 7):
            for b in range(a + 1, 257, 5):
                assert abs(mt.m0(a, b) - math.fsum(p[a:b])) <= 1e-12
                assert abs(mt.m1(a, b) - math.fsum(i[a:b] * p[a:b])) <= 1e-12 * max(1.0, mt.m1(a, b))


@pytest.mark.parametrize("method", sorted(OPTIMIZERS))
def test_scale_invariance(method):
    for h in random_histograms(12, seed=16, positive=True):
        base = OPTIMIZERS[method](normalize(h), 2)
        for k in (3, 1000):
            assert OPTIMIZERS[method](normalize(h * k), 2) == base


@pytest.mark.parametrize("method", sorted(OPTIMIZERS))
def test_dp_equals_exhaustive(method):
    hists = random_histograms(100, seed=17, positive=(method == "mcet"))
    for h in hists:
        cost = TABLES[method](normalize(h))
        for t in (1, 2):
            assert dp_search(cost, t)[0] == exhaustive_search(cost, t)[0]


@pytest.mark.parametrize("method", sorted(OPTIMIZERS))
def test_small_level_searches_match_direct_objective(method):
    objective = {
        "otsu": otsu_objective,
        "kapur": kapur_objective,
        "mcet": lambda p, ths: -mcet_cross_entropy(p, ths),
    }[method]
    for h in random_histograms(20, levels=32, seed=18):
        p = normalize(h)
        cost = TABLES[method](p)
        for t in (1, 2, 3):
            best, winners = brute_force(lambda ths: objective(p, ths), 32, t)
            dp = dp_search(cost, t)[0]
            assert dp == exhaustive_search(cost, t)[0]
            assert dp in winners


def test_degenerate_inputs():
    two = np.zeros(256)
    two[[10, 20]] = 0.5
    assert otsu_thresholds(two, 1) == (11,)
    with pytest.raises(DegenerateHistogram):
        otsu_thresholds(two, 2)
    with pytest.raises(ValueError):
        otsu_thresholds(two, 1, search="annealing")
    with pytest.raises(ValueError):
        otsu_objective(two, [20, 10])


def test_auto_search_on_cameraman(cameraman):
    p = normalize(np.bincount(cameraman.ravel(), minlength=256))
    assert otsu_thresholds(p, 1) == (103,)
    for fn in OPTIMIZERS.values():
        for t in (1, 2):
            assert fn(p, t, "dp") == fn(p, t, "exhaustive")


def test_otsu_agrees_with_scikit_image(cameraman):
    filters = pytest.importorskip("skimage.filters")
    p = normalize(np.bincount(cameraman.ravel(), minlength=256))
    # scikit-image puts level th in the lower class; here th opens the upper one
    for t in (1, 2, 3):
        ref = filters.threshold_multiotsu(cameraman, classes=t + 1)
        assert otsu_thresholds(p, t) == tuple(int(x) + 1 for x in ref)
