from itertools import permutations

import numpy as np
import pytest

from linfot.errors import CapExceeded, Infeasible, SizeMismatch
from linfot.measures import measure_from_pieces
from linfot.oracle import (
    band_feasible_coupling,
    sample_quantile_grid,
    sorted_matching_bottleneck,
    threshold_matching_bottleneck,
)


def exhaustive(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return min(float(np.max(np.abs(x - y[list(p)]))) for p in permutations(range(len(y))))


def test_quantile_grid_examples():
    assert sample_quantile_grid(measure_from_pieces([(0, 1, 1)]), 2).points.tolist() == [0.25, 0.75]
    assert sample_quantile_grid(measure_from_pieces([(1, 2, 1)]), 4).points.tolist() == [1.125, 1.375, 1.625, 1.875]
    split = measure_from_pieces([(0, 1, 0.5), (3, 4, 0.5)])
    assert sample_quantile_grid(split, 2).points.tolist() == [0.5, 3.5]


@pytest.mark.parametrize("oracle", [sorted_matching_bottleneck, threshold_matching_bottleneck])
def test_bottleneck_examples(oracle):
    assert oracle([0, 0.5, 1], [1, 1.5, 2]) == 1.0
    assert oracle([0, 1], [0.9, 1.1]) == 0.9
    assert oracle([0.2, 0.4, 3.0], [0.2, 0.4, 3.0]) == 0.0


def test_size_mismatch_and_cap():
    with pytest.raises(SizeMismatch):
        sorted_matching_bottleneck([0, 1], [0])
    with pytest.raises(SizeMismatch):
        threshold_matching_bottleneck([0, 1], [0])
    with pytest.raises(CapExceeded):
        threshold_matching_bottleneck(np.zeros(11), np.zeros(11), cap=10)


def test_threshold_oracle_against_permutations():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        x = rng.random(n)
        y = rng.random(n) * 2
        want = exhaustive(x, y)
        assert threshold_matching_bottleneck(x, y) == want
        assert sorted_matching_bottleneck(x, y) == want


def test_oracles_agree_with_ties():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        x = rng.integers(0, 6, n) / 4.0
        y = rng.integers(0, 6, n) / 4.0
        assert threshold_matching_bottleneck(x, y) == sorted_matching_bottleneck(x, y)


def test_band_coupling_examples():
    seen = set()
    for seed in range(20):
        plan = band_feasible_coupling([0, 1], [0.9, 1.1], 1.1, seed)
        assert plan.max_displacement() <= 1.1
        seen.add(tuple(plan.y.tolist()))
    assert seen == {(0.9, 1.1), (1.1, 0.9)}
    with pytest.raises(Infeasible):
        band_feasible_coupling([0, 1], [0.9, 1.1], 0.5, 0)


def test_band_coupling_deterministic_and_marginal_preserving():
    rng = np.random.default_rng(1)
    x, y = np.sort(rng.random(300)), np.sort(rng.random(300) + 0.1)
    lam = sorted_matching_bottleneck(x, y) + 0.05
    p1 = band_feasible_coupling(x, y, lam, 11)
    assert p1 == band_feasible_coupling(x, y, lam, 11)
    assert p1 != band_feasible_coupling(x, y, lam, 12)
    w = np.full(300, 1 / 300)
    p1.check_marginals(x, w, y, w)
    assert p1.max_displacement() <= lam


@pytest.mark.parametrize("n", [100, 400, 1000])
def test_band_coupling_on_e4_component(n):
    mu_1 = measure_from_pieces([(0, 1.5, 0.5)], tol=1.0)
    nu_1 = measure_from_pieces([(0, 1, 0.5), (1, 2, 0.25)], tol=1.0)
    xs, ys = sample_quantile_grid(mu_1, n), sample_quantile_grid(nu_1, n)
    plan = band_feasible_coupling(xs, ys, 0.5, seed=n, tol=1e-12)
    assert plan.max_displacement() <= 0.5 + 1e-12
