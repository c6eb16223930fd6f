"""Monotone (quantile) coupling, the critical distance and maximal displacement sets."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateCritical, InputError
from .measures import IntervalUnion, Measure1D

T_MERGE = 1e-14
LEVEL_TOL = 1e-12


def _snap(values: np.ndarray, grid: np.ndarray, tol: float) -> np.ndarray:
    """Replace values lying within ``tol`` of a grid point by that grid point."""
    k = np.clip(np.searchsorted(grid, values), 1, len(grid) - 1)
    left, right = grid[k - 1], grid[k]
    out = values.copy()
    out = np.where(np.abs(values - left) <= tol, left, out)
    out = np.where(np.abs(values - right) <= tol, right, out)
    return out


def _segment_quantiles(m: Measure1D, t0: np.ndarray, t1: np.ndarray):
    """One-sided limits of the quantile function at the ends of each open t-cell."""
    a, b, dens, cum_before, _ = m._arrays
    mid = 0.5 * (t0 + t1) * m.mass
    k = np.clip(np.searchsorted(m._arrays[4], mid, side="right"), 0, len(a) - 1)
    q0 = a[k] + (t0 * m.mass - cum_before[k]) / dens[k]
    q1 = a[k] + (t1 * m.mass - cum_before[k]) / dens[k]
    scale = max(1.0, abs(m.lo), abs(m.hi))
    grid = m.breakpoints()
    q0 = _snap(np.clip(q0, a[k], b[k]), grid, LEVEL_TOL * scale)
    q1 = _snap(np.clip(q1, a[k], b[k]), grid, LEVEL_TOL * scale)
    return q0, q1


@dataclass(frozen=True)
class MonotonePlan:
    """Quantile coupling ``t -> (Q_source(t), Q_target(t))`` of two measures of equal mass.

    The support is the closure of that curve. ``breakpoints`` are the levels where
    either quantile function changes slope or jumps; between consecutive levels
    both are affine, so the displacement is affine too.
    """

    source: Measure1D
    target: Measure1D
    breakpoints: tuple[float, ...]

    @cached_property
    def cells(self):
        """Per open t-cell: ``(t0, t1, x0, x1, y0, y1)`` with one-sided quantile limits."""
        t = np.array(self.breakpoints)
        t0, t1 = t[:-1], t[1:]
        x0, x1 = _segment_quantiles(self.source, t0, t1)
        y0, y1 = _segment_quantiles(self.target, t0, t1)
        return t0, t1, x0, x1, y0, y1

    def displacement_limits(self) -> tuple[np.ndarray, np.ndarray]:
        _, _, x0, x1, y0, y1 = self.cells
        return y0 - x0, y1 - x1

    def transport_map(self, x):
        """``T = Q_target o F_source``."""
        t = np.clip(np.asarray(self.source.cdf(x)) / self.source.mass, 0.0, 1.0)
        return self.target.quantile(t)

    def sample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """``n`` support points at the mid-levels ``(k - 1/2) / n``."""
        t = (np.arange(n) + 0.5) / n
        return self.source.quantile(t), self.target.quantile(t)

    def scale(self) -> float:
        return max(1.0, abs(self.source.lo), abs(self.source.hi), abs(self.target.lo), abs(self.target.hi))


def monotone_coupling(mu: Measure1D, nu: Measure1D) -> MonotonePlan:
    if abs(mu.mass - nu.mass) > 1e-9 * max(1.0, mu.mass):
        raise InputError(f"masses differ: {mu.mass} vs {nu.mass}")
    levels = np.concatenate([[0.0, 1.0], mu._arrays[4] / mu.mass, nu._arrays[4] / nu.mass])
    levels = np.unique(np.clip(levels, 0.0, 1.0))
    keep = [levels[0]]
    for v in levels[1:]:
        if v - keep[-1] > T_MERGE:
            keep.append(v)
    keep[-1] = 1.0
    return MonotonePlan(mu, nu, tuple(float(v) for v in keep))


def winf_value(plan: MonotonePlan) -> float:
    """Largest displacement of the monotone plan, i.e. the infinity-Wasserstein distance."""
    d0, d1 = plan.displacement_limits()
    return float(max(np.max(np.abs(d0)), np.max(np.abs(d1))))


@dataclass(frozen=True)
class DisplacementSets:
    m_plus: IntervalUnion
    m_minus: IntervalUnion
    m_all: IntervalUnion
    lambda_c: float

    def pairs_plus(self):
        """Pair set ``{(x, x + lambda_c)}`` as ``(x-interval, y-interval)`` components."""
        return [((lo, hi), (lo + self.lambda_c, hi + self.lambda_c)) for lo, hi in self.m_plus]

    def pairs_minus(self):
        return [((lo, hi), (lo - self.lambda_c, hi - self.lambda_c)) for lo, hi in self.m_minus]

    def reflect(self) -> "DisplacementSets":
        return DisplacementSets(self.m_minus.reflect(), self.m_plus.reflect(), self.m_all.reflect(), self.lambda_c)

    def to_json(self) -> dict:
        return {"lambda_c": self.lambda_c, "m_plus": self.m_plus.to_list(), "m_minus": self.m_minus.to_list()}

    @classmethod
    def from_json(cls, obj: dict) -> "DisplacementSets":
        try:
            mp = IntervalUnion.from_intervals(obj["m_plus"])
            mm = IntervalUnion.from_intervals(obj["m_minus"])
            lam = float(obj["lambda_c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("malformed displacement-set JSON") from exc
        return cls(mp, mm, mp.union(mm), lam)


def _level_set(plan: MonotonePlan, sign: int, lam: float, tol: float) -> IntervalUnion:
    _, _, x0, x1, y0, y1 = plan.cells
    d0, d1 = sign * (y0 - x0), sign * (y1 - x1)
    hit0 = np.abs(d0 - lam) <= tol
    hit1 = np.abs(d1 - lam) <= tol
    parts = []
    for k in range(len(x0)):
        if hit0[k] and hit1[k]:
            parts.append((x0[k], x1[k]))
        elif hit0[k]:
            parts.append((x0[k], x0[k]))
        elif hit1[k]:
            parts.append((x1[k], x1[k]))
    return IntervalUnion.from_intervals(parts)


def maximal_displacement_sets(plan: MonotonePlan, lambda_c: float | None = None) -> DisplacementSets:
    """Points moved by exactly ``+lambda_c`` (``m_plus``) or ``-lambda_c`` (``m_minus``).

    Level sets are read off the affine displacement on each t-cell, using the
    one-sided limits at cell ends so that the result is the projection of the
    closed support.
    """
    lam = winf_value(plan) if lambda_c is None else lambda_c
    tol = LEVEL_TOL * plan.scale()
    if lam <= tol:
        raise DegenerateCritical("critical distance is zero; the two measures coincide")
    mp = _level_set(plan, +1, lam, tol)
    mm = _level_set(plan, -1, lam, tol)
    return DisplacementSets(mp, mm, mp.union(mm), lam)


def reflect(mu: Measure1D) -> Measure1D:
    return mu.reflect()


def reflect_plan(plan: MonotonePlan) -> MonotonePlan:
    """Monotone plan of the mirrored problem ``(x, y) -> (-x, -y)``."""
    return monotone_coupling(plan.source.reflect(), plan.target.reflect())
