"""Brute-force ground truth: discrete bottleneck matching and band-constrained couplings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapExceeded, Infeasible, InputError, SizeMismatch
from .measures import DiscretePlan, Measure1D

THRESHOLD_CAP = 2000


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if np.any(np.diff(pts) < 0):
            raise InputError("sample points must be sorted ascending")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self.points), self.mass / len(self.points))


def sample_quantile_grid(m: Measure1D, n: int) -> SampleSet:
    """Points ``Q((k - 1/2) / n)``, ``k = 1..n``, each carrying ``mass / n``."""
    if n < 1:
        raise InputError("n must be >= 1")
    return SampleSet(m.quantile((np.arange(n) + 0.5) / n), m.mass)


def _points(s) -> np.ndarray:
    return s.points if isinstance(s, SampleSet) else np.sort(np.asarray(s, dtype=float).ravel())


def sorted_matching_bottleneck(xs, ys) -> float:
    x, y = _points(xs), _points(ys)
    if len(x) != len(y):
        raise SizeMismatch(f"sample sizes differ: {len(x)} vs {len(y)}")
    if len(x) == 0:
        return 0.0
    return float(np.max(np.abs(x - y)))


class _BandMatcher:
    """Maximum matching on the interval graph ``|x_i - y_j| <= lam`` over sorted points."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.x, self.y = x, y
        n = len(x)
        self.match_l = np.full(n, -1, dtype=np.int64)
        self.match_r = np.full(n, -1, dtype=np.int64)
        self.order = np.arange(n, dtype=np.int64)
        self.offsets = np.zeros(n)

    def perfect(self, lam: float, warm: tuple[np.ndarray, np.ndarray] | None = None) -> bool:
        lo, hi = kernels.band_ranges(self.x, self.y, lam)
        if warm is None:
            self.match_l[:] = -1
            self.match_r[:] = -1
        else:
            self.match_l[:], self.match_r[:] = warm
        kernels.greedy_random_start(lo, hi, self.order, self.offsets, self.match_l, self.match_r)
        return kernels.augment_matching(lo, hi, self.match_l, self.match_r) == len(self.x)


def _next_distance_at_least(x: np.ndarray, y: np.ndarray, v: float) -> float:
    """Smallest ``|x_i - y_j|`` that is ``>= v`` (``inf`` if none)."""
    lo, hi = kernels.band_ranges(x, y, np.nextafter(v, -np.inf))
    n = len(y)
    left = np.where(lo > 0, np.abs(y[np.maximum(lo - 1, 0)] - x), np.inf)
    right = np.where(hi < n, np.abs(y[np.minimum(hi, n - 1)] - x), np.inf)
    return float(min(left.min(), right.min()))


def _prev_distance_at_most(x: np.ndarray, y: np.ndarray, v: float) -> float:
    """Largest ``|x_i - y_j|`` that is ``<= v`` (``-inf`` if none)."""
    lo, hi = kernels.band_ranges(x, y, v)
    n = len(y)
    ok = hi > lo
    first = np.abs(y[np.minimum(lo, n - 1)] - x)
    last = np.abs(y[np.maximum(hi - 1, 0)] - x)
    return float(np.max(np.where(ok, np.maximum(first, last), -np.inf)))


def threshold_matching_bottleneck(xs, ys, cap: int = THRESHOLD_CAP) -> float:
    """Smallest pairwise distance ``lam`` whose band graph has a perfect matching.

    Bisection runs on values; every probe is snapped to an actual pairwise
    distance, so the answer is one of the ``n**2`` candidates. A failed probe's
    maximum matching stays valid for larger thresholds and seeds the next one.
    """
    x, y = _points(xs), _points(ys)
    n = len(x)
    if n != len(y):
        raise SizeMismatch(f"sample sizes differ: {n} vs {len(y)}")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the threshold-oracle cap {cap}")
    if n == 0:
        return 0.0
    matcher = _BandMatcher(x, y)
    lo_val = -1.0  # largest probed infeasible value
    hi_val = float(max(abs(x[-1] - y[0]), abs(y[-1] - x[0])))  # always feasible
    warm = None
    while True:
        mid = 0.5 * (max(lo_val, 0.0) + hi_val)
        cand = _next_distance_at_least(x, y, mid)
        if not (lo_val < cand < hi_val):
            cand = _prev_distance_at_most(x, y, mid)
            if not (lo_val < cand < hi_val):
                return hi_val
        if matcher.perfect(cand, warm):
            hi_val = cand
        else:
            lo_val = cand
            warm = (matcher.match_l.copy(), matcher.match_r.copy())


def band_feasible_coupling(xs, ys, lam: float, seed: int, tol: float = 0.0) -> DiscretePlan:
    """Random perfect matching using only pairs with ``|x - y| <= lam + tol``.

    A seeded random first-fit assignment is completed by augmenting paths; the
    result is a different optimal coupling for each seed whenever the band
    admits several.
    """
    xset = xs if isinstance(xs, SampleSet) else SampleSet(np.sort(np.asarray(xs, dtype=float)))
    yset = ys if isinstance(ys, SampleSet) else SampleSet(np.sort(np.asarray(ys, dtype=float)), xset.mass)
    x, y = xset.points, yset.points
    n = len(x)
    if n != len(y):
        raise SizeMismatch(f"sample sizes differ: {n} vs {len(y)}")
    rng = np.random.default_rng(seed)
    matcher = _BandMatcher(x, y)
    matcher.order = rng.permutation(n).astype(np.int64)
    matcher.offsets = rng.random(n)
    if not matcher.perfect(lam + tol):
        raise Infeasible(f"no perfect matching within band {lam}")
    w = np.full(n, xset.mass / n)
    return DiscretePlan(x, y[matcher.match_l], w, {"seed": seed})


def brute_force_bottleneck(xs, ys) -> float:
    """Minimum over all permutations; only for tiny ``n``."""
    from itertools import permutations

    x, y = _points(xs), _points(ys)
    if len(x) != len(y):
        raise SizeMismatch(f"sample sizes differ: {len(x)} vs {len(y)}")
    if len(x) > 9:
        raise CapExceeded("permutation brute force is limited to n <= 9")
    if len(x) == 0:
        return 0.0
    return float(min(np.max(np.abs(x - y[list(p)])) for p in permutations(range(len(y)))))
