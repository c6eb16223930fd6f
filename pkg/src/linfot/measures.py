"""Exact piecewise representations of measures and potentials on the real line.

Measures are atomless with piecewise-constant densities, so CDFs and quantile
functions are piecewise linear and every integral against a piecewise-linear
function can be computed in closed form (midpoint rule per linear cell).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, MarginalMismatch, MassNotOne, NegativeDensity, OverlappingPieces, InputError

MASS_TOL = 1e-12
INTEGRAL_TOL = 1e-9


# --------------------------------------------------------------------------
# interval unions


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of closed intervals; ``lo == hi`` encodes a single point."""

    components: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        comps = tuple((float(lo), float(hi)) for lo, hi in self.components)
        for lo, hi in comps:
            if not lo <= hi:
                raise InputError(f"bad interval [{lo}, {hi}]")
        for (_, h0), (l1, _) in zip(comps, comps[1:]):
            if not l1 > h0:
                raise InputError("components must be sorted with positive gaps")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence[float]], tol: float = 0.0) -> "IntervalUnion":
        """Merge arbitrary closed intervals; components closer than ``tol`` are fused."""
        items = sorted((float(lo), float(hi)) for lo, hi in intervals)
        merged: list[list[float]] = []
        for lo, hi in items:
            if hi < lo:
                raise InputError(f"bad interval [{lo}, {hi}]")
            if merged and lo <= merged[-1][1] + tol:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    def __bool__(self) -> bool:
        return bool(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def lo(self) -> float:
        return self.components[0][0]

    @property
    def hi(self) -> float:
        return self.components[-1][1]

    def length(self) -> float:
        return sum(hi - lo for lo, hi in self.components)

    def contains(self, x, tol: float = 0.0):
        """Vectorised closed-membership test."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.components:
            out |= (x >= lo - tol) & (x <= hi + tol)
        return out if out.ndim else bool(out)

    def endpoints(self) -> list[float]:
        pts: list[float] = []
        for lo, hi in self.components:
            pts.append(lo)
            if hi != lo:
                pts.append(hi)
        return pts

    def singletons(self) -> list[float]:
        return [lo for lo, hi in self.components if lo == hi]

    def union(self, other: "IntervalUnion", tol: float = 0.0) -> "IntervalUnion":
        return IntervalUnion.from_intervals(self.components + other.components, tol)

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a0, a1 in self.components:
            for b0, b1 in other.components:
                lo, hi = max(a0, b0), min(a1, b1)
                if lo <= hi:
                    out.append((lo, hi))
        return IntervalUnion.from_intervals(out)

    def intersects_open(self, lo: float, hi: float, tol: float = 0.0) -> bool:
        """True if some point of the union lies in the open interval ``(lo, hi)``."""
        for c0, c1 in self.components:
            if c1 > lo + tol and c0 < hi - tol:
                return True
        return False

    def shift(self, c: float) -> "IntervalUnion":
        return IntervalUnion(tuple((lo + c, hi + c) for lo, hi in self.components))

    def reflect(self) -> "IntervalUnion":
        return IntervalUnion(tuple((-hi + 0.0, -lo + 0.0) for lo, hi in reversed(self.components)))

    def gaps_within(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Maximal open intervals of ``(lo, hi)`` minus the union."""
        out = []
        cur = lo
        for c0, c1 in self.components:
            if c1 < lo or c0 > hi:
                continue
            if c0 > cur:
                out.append((cur, c0))
            cur = max(cur, c1)
        if cur < hi:
            out.append((cur, hi))
        return out

    def grid(self, step: float) -> np.ndarray:
        """Points covering every component at spacing at most ``step``, endpoints included."""
        pts = []
        for lo, hi in self.components:
            k = max(1, int(np.ceil((hi - lo) / step))) if hi > lo else 0
            pts.append(np.linspace(lo, hi, k + 1))
        return np.concatenate(pts) if pts else np.empty(0)

    def isclose(self, other: "IntervalUnion", tol: float = 1e-12) -> bool:
        if len(self) != len(other):
            return False
        return all(
            abs(a0 - b0) <= tol and abs(a1 - b1) <= tol
            for (a0, a1), (b0, b1) in zip(self.components, other.components)
        )

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.components]


# --------------------------------------------------------------------------
# atomless piecewise-uniform measures


@dataclass(frozen=True)
class Measure1D:
    """Finite atomless measure with a piecewise-constant density.

    ``pieces`` is a sorted tuple of ``(left, right, density)``. Zero-density
    pieces are dropped on construction. Total mass is not constrained here;
    use :func:`measure_from_pieces` for probability measures.
    """

    pieces: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        kept = []
        prev_right = -np.inf
        for k, piece in enumerate(self.pieces):
            a, b, dens = (float(v) for v in piece)
            if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(dens)):
                raise InputError(f"piece {k} has non-finite entries")
            if not a < b:
                raise OverlappingPieces(f"piece {k}: left {a} must be < right {b}")
            if dens < 0:
                raise NegativeDensity(f"piece {k}: density {dens} < 0")
            if a < prev_right:
                raise OverlappingPieces(f"piece {k} starts at {a} before previous end {prev_right}")
            prev_right = b
            if dens > 0:
                kept.append((a, b, dens))
        if not kept:
            raise InputError("measure has no positive-density piece")
        object.__setattr__(self, "pieces", tuple(kept))

    @cached_property
    def _arrays(self):
        p = np.array(self.pieces, dtype=float)
        a, b, dens = p[:, 0], p[:, 1], p[:, 2]
        masses = dens * (b - a)
        cum_after = np.cumsum(masses)
        cum_before = cum_after - masses
        return a, b, dens, cum_before, cum_after

    @property
    def mass(self) -> float:
        return float(self._arrays[4][-1])

    @property
    def lo(self) -> float:
        return self.pieces[0][0]

    @property
    def hi(self) -> float:
        return self.pieces[-1][1]

    def breakpoints(self) -> np.ndarray:
        a, b = self._arrays[:2]
        return np.unique(np.concatenate([a, b]))

    def support(self) -> IntervalUnion:
        return IntervalUnion.from_intervals((a, b) for a, b, _ in self.pieces)

    def density(self, x):
        a, b, dens = self._arrays[:3]
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(a, x, side="right") - 1
        kc = np.clip(k, 0, len(a) - 1)
        inside = (k >= 0) & (x < b[kc])
        out = np.where(inside, dens[kc], 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        """``m((-inf, x])``; continuous and nondecreasing."""
        a, b, dens, cum_before, _ = self._arrays
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(a, x, side="right") - 1
        kc = np.clip(k, 0, len(a) - 1)
        val = cum_before[kc] + dens[kc] * (np.minimum(x, b[kc]) - a[kc])
        out = np.where(k < 0, 0.0, val)
        return out if out.ndim else float(out)

    def quantile(self, t):
        """Smallest ``x`` with ``F(x) >= t`` (mass-normalised by :attr:`mass`).

        ``t`` is a fraction of the total mass. At a CDF plateau the left edge of
        the next positive-density piece is returned, so ``quantile(0)`` is the
        left end of the support.
        """
        a, b, dens, cum_before, cum_after = self._arrays
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > 1) or np.any(np.isnan(t_arr)):
            raise DomainError(f"quantile level outside [0, 1]: {t}")
        s = t_arr * self.mass
        k = np.searchsorted(cum_after, s, side="right")
        k = np.clip(k, 0, len(a) - 1)
        x = a[k] + (s - cum_before[k]) / dens[k]
        x = np.clip(x, a[k], b[k])
        x = np.where(t_arr >= 1.0, b[-1], x)
        return x if x.ndim else float(x)

    def mass_in(self, lo: float, hi: float) -> float:
        """Mass of ``[lo, hi]`` (endpoints are null sets)."""
        if hi < lo:
            return 0.0
        return float(self.cdf(hi) - self.cdf(lo))

    def restrict(self, lo: float, hi: float) -> "Measure1D | None":
        """Restriction to the closed interval ``[lo, hi]``; ``None`` if it carries no mass."""
        out = []
        for a, b, dens in self.pieces:
            l, r = max(a, lo), min(b, hi)
            if l < r:
                out.append((l, r, dens))
        return Measure1D(tuple(out)) if out else None

    def restrict_union(self, u: IntervalUnion) -> "Measure1D | None":
        out = []
        for lo, hi in u:
            for a, b, dens in self.pieces:
                l, r = max(a, lo), min(b, hi)
                if l < r:
                    out.append((l, r, dens))
        out.sort()
        return Measure1D(tuple(out)) if out else None

    def shift(self, c: float) -> "Measure1D":
        return Measure1D(tuple((a + c, b + c, d) for a, b, d in self.pieces))

    def reflect(self) -> "Measure1D":
        """Pushforward under ``x -> -x``."""
        return Measure1D(tuple((-b + 0.0, -a + 0.0, d) for a, b, d in reversed(self.pieces)))

    def to_json(self) -> dict:
        return {"pieces": [{"a": a, "b": b, "density": d} for a, b, d in self.pieces]}


def measure_from_pieces(pieces: Iterable[Sequence[float]], tol: float = MASS_TOL) -> Measure1D:
    """Validated probability measure from ``(left, right, density)`` triples."""
    pieces = tuple(tuple(float(v) for v in p) for p in pieces)
    for k, p in enumerate(pieces):
        if len(p) != 3:
            raise InputError(f"piece {k} must have 3 entries, got {len(p)}")
    mass = sum(d * (b - a) for a, b, d in pieces)
    m = Measure1D(pieces)
    if abs(mass - 1.0) > tol:
        raise MassNotOne(mass)
    return m


def measure_from_json(obj: dict) -> Measure1D:
    if not isinstance(obj, dict) or "pieces" not in obj:
        raise InputError('measure JSON must be an object with a "pieces" list')
    pieces = []
    for k, p in enumerate(obj["pieces"]):
        try:
            pieces.append((float(p["a"]), float(p["b"]), float(p["density"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"piece {k} is malformed: {p!r}") from exc
    return measure_from_pieces(pieces)


def cdf_eval(m: Measure1D, x):
    return m.cdf(x)


def quantile_eval(m: Measure1D, t):
    return m.quantile(t)


def support_diameter(*measures: Measure1D) -> float:
    return max(m.hi for m in measures) - min(m.lo for m in measures)


# --------------------------------------------------------------------------
# signed measures with atoms


@dataclass(frozen=True)
class SignedMeasure1D:
    """Finitely many atoms plus uniform-density segments, any sign."""

    atoms: tuple[tuple[float, float], ...] = ()
    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        atoms = tuple(sorted((float(p), float(w)) for p, w in self.atoms))
        segs = tuple(sorted((float(lo), float(hi), float(d)) for lo, hi, d in self.segments))
        positions = [p for p, _ in atoms]
        if len(set(positions)) != len(positions):
            raise InputError("atoms must sit at distinct positions")
        for lo, hi, _ in segs:
            if not lo < hi:
                raise InputError(f"bad segment [{lo}, {hi}]")
        for (_, h0, _), (l1, _, _) in zip(segs, segs[1:]):
            if l1 < h0:
                raise InputError("segments must be disjoint")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segs)

    def cumulative(self, x):
        """``rho((-inf, x])``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for p, w in self.atoms:
            out += np.where(x >= p, w, 0.0)
        for lo, hi, d in self.segments:
            out += d * (np.clip(x, lo, hi) - lo)
        return out if out.ndim else float(out)

    def total_variation(self) -> float:
        return sum(abs(w) for _, w in self.atoms) + sum(abs(d) * (hi - lo) for lo, hi, d in self.segments)

    def total(self) -> float:
        return sum(w for _, w in self.atoms) + sum(d * (hi - lo) for lo, hi, d in self.segments)

    def breakpoints(self) -> list[float]:
        pts = {p for p, _ in self.atoms}
        for lo, hi, _ in self.segments:
            pts.update((lo, hi))
        return sorted(pts)

    def support(self, sign: int = 0) -> IntervalUnion:
        """Support of the measure (``sign=0``), or of its Jordan positive/negative part."""

        def keep(v):
            return v != 0 if sign == 0 else (v > 0 if sign > 0 else v < 0)

        parts = [(p, p) for p, w in self.atoms if keep(w)]
        parts += [(lo, hi) for lo, hi, d in self.segments if keep(d)]
        return IntervalUnion.from_intervals(parts)


# --------------------------------------------------------------------------
# right-continuous piecewise-linear functions with jumps


@dataclass(frozen=True)
class BVPotential:
    """Right-continuous, piecewise-linear function of bounded variation.

    Constant ``value_left`` before the first breakpoint; on ``[x_k, x_{k+1})`` it
    equals ``values[k] + slopes[k] * (x - x_k)``. ``jumps[k]`` is the value at
    ``x_k`` minus the left limit there, stored exactly.
    """

    xs: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    slopes: tuple[float, ...] = ()
    jumps: tuple[float, ...] = ()
    value_left: float = 0.0

    def __post_init__(self):
        n = len(self.xs)
        if not (len(self.values) == len(self.slopes) == len(self.jumps) == n):
            raise InputError("breakpoint arrays must have equal length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise InputError("breakpoints must be strictly increasing")
        for name in ("xs", "values", "slopes", "jumps"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "value_left", float(self.value_left))

    @classmethod
    def from_breakpoints(cls, value_left: float, breakpoints: Iterable[Sequence[float]]) -> "BVPotential":
        """Build from ``(x, value_right, slope_right)`` triples; jumps are derived."""
        bps = sorted((float(x), float(v), float(s)) for x, v, s in breakpoints)
        xs = [b[0] for b in bps]
        vals = [b[1] for b in bps]
        slopes = [b[2] for b in bps]
        jumps = []
        prev = value_left
        for k in range(len(xs)):
            left = prev if k == 0 else vals[k - 1] + slopes[k - 1] * (xs[k] - xs[k - 1])
            jumps.append(vals[k] - left)
        return cls(tuple(xs), tuple(vals), tuple(slopes), tuple(jumps), value_left)

    @classmethod
    def constant(cls, c: float = 0.0) -> "BVPotential":
        return cls(value_left=c)

    @cached_property
    def _arr(self):
        return np.array(self.xs), np.array(self.values), np.array(self.slopes)

    def __call__(self, x):
        xs, vals, slopes = self._arr
        x = np.asarray(x, dtype=float)
        if not len(xs):
            out = np.full(x.shape, self.value_left)
            return out if out.ndim else float(out)
        k = np.searchsorted(xs, x, side="right") - 1
        kc = np.clip(k, 0, len(xs) - 1)
        out = np.where(k < 0, self.value_left, vals[kc] + slopes[kc] * (x - xs[kc]))
        return out if out.ndim else float(out)

    def left_limit(self, x):
        xs, vals, slopes = self._arr
        x = np.asarray(x, dtype=float)
        if not len(xs):
            out = np.full(x.shape, self.value_left)
            return out if out.ndim else float(out)
        k = np.searchsorted(xs, x, side="left") - 1
        kc = np.clip(k, 0, len(xs) - 1)
        out = np.where(k < 0, self.value_left, vals[kc] + slopes[kc] * (x - xs[kc]))
        return out if out.ndim else float(out)

    def jump(self, x: float) -> float:
        """Value minus left limit at ``x``; exact at stored breakpoints, 0 elsewhere."""
        k = int(np.searchsorted(self._arr[0], x))
        if k < len(self.xs) and self.xs[k] == x:
            return self.jumps[k]
        return 0.0

    def total_variation(self) -> float:
        tv = sum(abs(j) for j in self.jumps)
        for k in range(len(self.xs) - 1):
            tv += abs(self.slopes[k]) * (self.xs[k + 1] - self.xs[k])
        if self.xs and self.slopes[-1] != 0:
            return float("inf")
        return tv

    def _derivative_parts(self, keep) -> IntervalUnion:
        parts = [(x, x) for x, j in zip(self.xs, self.jumps) if keep(j)]
        for k in range(len(self.xs)):
            if keep(self.slopes[k]):
                right = self.xs[k + 1] if k + 1 < len(self.xs) else float("inf")
                parts.append((self.xs[k], right))
        return IntervalUnion.from_intervals(parts)

    def derivative_support(self, tol: float = 0.0) -> IntervalUnion:
        """Closed support of the distributional derivative."""
        return self._derivative_parts(lambda v: abs(v) > tol)

    def negative_derivative_support(self, tol: float = 0.0) -> IntervalUnion:
        """Closed support of the negative part of the derivative."""
        return self._derivative_parts(lambda v: v < -tol)

    def scaled(self, c: float) -> "BVPotential":
        return BVPotential(
            self.xs,
            tuple(c * v for v in self.values),
            tuple(c * s for s in self.slopes),
            tuple(c * j for j in self.jumps),
            c * self.value_left,
        )

    def to_json(self) -> dict:
        return {
            "value_left": self.value_left,
            "breakpoints": [
                {"x": x, "value_right": v, "slope_right": s, "jump": j}
                for x, v, s, j in zip(self.xs, self.values, self.slopes, self.jumps)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BVPotential":
        try:
            bps = obj["breakpoints"]
            xs = [float(b["x"]) for b in bps]
            vals = [float(b["value_right"]) for b in bps]
            slopes = [float(b["slope_right"]) for b in bps]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("malformed potential JSON") from exc
        pot = cls.from_breakpoints(float(obj.get("value_left", 0.0)), zip(xs, vals, slopes))
        if all("jump" in b for b in bps):
            pot = cls(pot.xs, pot.values, pot.slopes, tuple(float(b["jump"]) for b in bps), pot.value_left)
        return pot


def integrate_bv(f: BVPotential, m: Measure1D) -> float:
    """Exact ``∫ f dm``: midpoint rule on every cell where ``f`` is linear and ``m`` uniform."""
    cuts = np.union1d(m.breakpoints(), np.asarray(f.xs))
    cuts = cuts[(cuts >= m.lo) & (cuts <= m.hi)]
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    widths = np.diff(cuts)
    return float(np.sum(widths * m.density(mids) * f(mids)))


# --------------------------------------------------------------------------
# discrete plans


@dataclass(frozen=True, eq=False)
class DiscretePlan:
    """Weighted point coupling ``sum_k w_k delta_(x_k, y_k)``."""

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        w = np.asarray(self.w, dtype=float).ravel()
        if not (len(x) == len(y) == len(w)):
            raise InputError("plan arrays must have equal length")
        if np.any(w <= 0):
            raise InputError("plan weights must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return len(self.x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscretePlan):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("x", "y", "w"))

    __hash__ = None

    @classmethod
    def concat(cls, plans: Iterable["DiscretePlan"]) -> "DiscretePlan":
        plans = list(plans)
        if not plans:
            return cls(np.empty(0), np.empty(0), np.empty(0))
        return cls(
            np.concatenate([p.x for p in plans]),
            np.concatenate([p.y for p in plans]),
            np.concatenate([p.w for p in plans]),
        )

    @property
    def total_mass(self) -> float:
        return float(self.w.sum())

    def max_displacement(self) -> float:
        return float(np.max(np.abs(self.y - self.x))) if len(self) else 0.0

    def marginal(self, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """Sorted support points and summed weights of one marginal."""
        pts = self.x if axis == 0 else self.y
        uniq, inv = np.unique(pts, return_inverse=True)
        return uniq, np.bincount(inv, weights=self.w, minlength=len(uniq))

    def check_marginals(self, xs: np.ndarray, xw: np.ndarray, ys: np.ndarray, yw: np.ndarray, tol: float = 1e-9):
        """Raise :class:`MarginalMismatch` unless the marginals equal the given discrete measures."""
        for axis, pts, wts in ((0, xs, xw), (1, ys, yw)):
            u, uw = self.marginal(axis)
            tu, inv = np.unique(np.asarray(pts, dtype=float), return_inverse=True)
            tw = np.bincount(inv, weights=np.asarray(wts, dtype=float), minlength=len(tu))
            if len(u) != len(tu) or np.any(u != tu) or np.max(np.abs(uw - tw)) > tol:
                raise MarginalMismatch(f"marginal {axis} does not match the prescribed discretisation")

    def to_json(self) -> dict:
        return {"atoms": [{"x": a, "y": b, "w": c} for a, b, c in zip(self.x.tolist(), self.y.tolist(), self.w.tolist())]}

    @classmethod
    def from_json(cls, obj: dict) -> "DiscretePlan":
        try:
            atoms = obj["atoms"]
            x = [float(a["x"]) for a in atoms]
            y = [float(a["y"]) for a in atoms]
            w = [float(a["w"]) for a in atoms]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("malformed plan JSON") from exc
        return cls(np.array(x), np.array(y), np.array(w))
