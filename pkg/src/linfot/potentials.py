"""Non-trivial Kantorovich potentials for the one-dimensional L-infinity problem.

A signed measure ``rho`` is placed on the maximal displacement set (positive on
points moved right, negative on points moved left); ``phi = -rho((-inf, x])`` and
``psi(y) = inf {-phi(x) : |x - y| <= lambda}``. The pair is admissible by
construction and has zero dual value whenever ``lambda`` is the critical distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .coupling import DisplacementSets, maximal_displacement_sets, monotone_coupling, winf_value
from .errors import DegenerateCritical, InputError
from .measures import BVPotential, IntervalUnion, Measure1D, SignedMeasure1D, integrate_bv

REPORT_TOL = 1e-9


@dataclass(frozen=True)
class RhoConfig:
    """Weights of the finite signed measure carried by the displacement sets.

    Points of ``M+ ∩ M-`` receive ``z_plus_weight - z_minus_weight``; keeping it
    positive makes every extreme point of ``M+`` an upward atom of ``rho`` and
    hence a downward jump of ``phi``.
    """

    endpoint_weight: float = 1.0
    interior_density: float = 1.0
    z_plus_weight: float = 2.0
    z_minus_weight: float = 1.0

    def __post_init__(self):
        for name in ("endpoint_weight", "interior_density", "z_plus_weight", "z_minus_weight"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be strictly positive")


def build_rho(sets: DisplacementSets, cfg: RhoConfig = RhoConfig()) -> SignedMeasure1D:
    if not sets.lambda_c > 0:
        raise DegenerateCritical("critical distance is zero")
    zs = [lo for lo, _ in sets.m_plus.intersection(sets.m_minus)]
    atoms: dict[float, float] = {}
    segments = []
    for sign, own, other in ((1.0, sets.m_plus, sets.m_minus), (-1.0, sets.m_minus, sets.m_plus)):
        for lo, hi in own:
            if hi > lo:
                segments.append((lo, hi, sign * cfg.interior_density))
            for p in {lo, hi}:
                if not other.contains(p):
                    atoms[p] = atoms.get(p, 0.0) + sign * cfg.endpoint_weight
    for z in zs:
        atoms[z] = atoms.get(z, 0.0) + cfg.z_plus_weight - cfg.z_minus_weight
    return SignedMeasure1D(tuple((p, w) for p, w in atoms.items() if w != 0.0), tuple(segments))


def build_phi(rho: SignedMeasure1D) -> BVPotential:
    """``phi(x) = -rho((-inf, x])`` as an exact right-continuous BV function."""
    pts = rho.breakpoints()
    if not pts:
        return BVPotential.constant(0.0)
    atom_w = dict(rho.atoms)
    values, slopes, jumps = [], [], []
    for p in pts:
        values.append(-rho.cumulative(p))
        slopes.append(-sum(d for lo, hi, d in rho.segments if lo <= p < hi))
        jumps.append(-atom_w.get(p, 0.0))
    return BVPotential(tuple(pts), tuple(values), tuple(slopes), tuple(jumps), 0.0)


# --------------------------------------------------------------------------
# sliding-window infimum


def window_inf_point(phi: BVPotential, lam: float, y: float) -> float:
    """``inf {-phi(x) : y - lam <= x <= y + lam}`` at a single point, by enumeration.

    Candidates: both window ends, values at breakpoints inside the window, and
    left limits at breakpoints in ``(y - lam, y + lam]``.
    """
    lo, hi = y - lam, y + lam
    vals = [-phi(lo), -phi(hi)]
    for x in phi.xs:
        if lo <= x <= hi:
            vals.append(-phi(x))
        if lo < x <= hi:
            vals.append(-phi.left_limit(x))
    return float(min(vals)) + 0.0


def _lower_envelope(lines, u, v):
    """Pieces ``(start, value_at_start, slope)`` of the min of affine functions on ``[u, v)``.

    ``lines`` holds ``(value_at_u, slope)``; ``v`` may be ``inf``.
    """
    cuts = [u]
    for (a0, s0), (a1, s1) in combinations(lines, 2):
        if s0 != s1:
            t = u + (a1 - a0) / (s0 - s1)
            if u < t < v:
                cuts.append(t)
    cuts = sorted(set(cuts))
    out = []
    for k, c in enumerate(cuts):
        nxt = cuts[k + 1] if k + 1 < len(cuts) else (v if np.isfinite(v) else c + 2.0)
        m = 0.5 * (c + nxt)
        best = min(lines, key=lambda ln: (ln[0] + ln[1] * (m - u), ln[1]))
        out.append((c, best[0] + best[1] * (c - u), best[1]))
    return out


def build_psi(phi: BVPotential, lam: float) -> BVPotential:
    """Exact sliding-window infimum of ``-phi`` over ``[y - lam, y + lam]``.

    Between consecutive points of ``{p - lam, p + lam}`` (``p`` a breakpoint of
    ``phi``) the window never crosses a breakpoint, so the infimum is the lower
    envelope of the two affine end-value functions and one constant (the least
    value or left limit at breakpoints strictly inside the window).
    """
    if lam < 0:
        raise InputError("window half-width must be nonnegative")
    if not phi.xs:
        return BVPotential.constant(-phi.value_left)
    xs = np.array(phi.xs)
    g_right = -np.array(phi.values)
    g_slope = -np.array(phi.slopes)
    g_left_lim = -np.asarray(phi.left_limit(xs))
    g_inf_left = -phi.value_left

    def affine_at(x_mid, u, shift):
        # g(y + shift) on the y-cell containing u, as (value at u, slope)
        k = int(np.searchsorted(xs, x_mid, side="right")) - 1
        if k < 0:
            return (g_inf_left, 0.0)
        return (g_right[k] + g_slope[k] * (u + shift - xs[k]), g_slope[k])

    cuts = np.unique(np.concatenate([xs - lam, xs + lam]))
    pieces = []
    bounds = list(cuts) + [np.inf]
    for k, u in enumerate(bounds[:-1]):
        v = bounds[k + 1]
        m = 0.5 * (u + v) if np.isfinite(v) else u + 1.0
        lines = [affine_at(m - lam, u, -lam), affine_at(m + lam, u, lam)]
        inside = (xs > m - lam) & (xs < m + lam)
        if np.any(inside):
            const = min(g_right[inside].min(), g_left_lim[inside].min())
            lines.append((float(const), 0.0))
        pieces.extend(_lower_envelope(lines, u, v))

    merged = []
    for start, val, slope in pieces:
        if merged:
            ps, pv, pslope = merged[-1]
            if pslope == slope and abs(pv + pslope * (start - ps) - val) <= 1e-14 * max(1.0, abs(val)):
                continue
        merged.append((start, val, slope))
    merged = [(s, v + 0.0, sl + 0.0) for s, v, sl in merged]
    value_left = g_inf_left + 0.0
    while merged and merged[0][2] == 0.0 and merged[0][1] == value_left:
        merged.pop(0)
    return BVPotential.from_breakpoints(value_left, merged)


# --------------------------------------------------------------------------
# dual checks


@dataclass(frozen=True)
class DualReport:
    feasible: bool
    worst_violation: float
    violating_pair: Optional[tuple[float, float]]
    dual_value: float
    lam: float
    tol: float = REPORT_TOL

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "worst_violation": self.worst_violation,
            "violating_pair": list(self.violating_pair) if self.violating_pair else None,
            "dual_value": self.dual_value,
            "lambda": self.lam,
            "tol": self.tol,
        }


def dual_value(phi: BVPotential, psi: BVPotential, mu: Measure1D, nu: Measure1D) -> float:
    return integrate_bv(phi, mu) + integrate_bv(psi, nu)


def _candidates(base: np.ndarray, lam: float, support: IntervalUnion, grid_step: Optional[float]) -> np.ndarray:
    pts = [base, base - lam, base + lam]
    if grid_step:
        pts.append(support.grid(grid_step))
    pts = np.unique(np.concatenate(pts))
    return pts[support.contains(pts)]


def check_dual_feasibility(
    phi: BVPotential,
    psi: BVPotential,
    lam: float,
    mu: Measure1D,
    nu: Measure1D,
    grid_step: Optional[float] = 1e-3,
    tol: float = REPORT_TOL,
) -> DualReport:
    """Largest ``phi(x) + psi(y)`` over ``|y - x| <= lam``, ``x`` in supp mu and ``y`` in supp nu.

    The search runs over breakpoints of both potentials and both measures, their
    ``±lam`` translates, and an optional uniform grid of spacing ``grid_step``.
    """
    base = np.unique(np.concatenate([np.array(phi.xs), np.array(psi.xs), mu.breakpoints(), nu.breakpoints()]))
    xs = _candidates(base, lam, mu.support(), grid_step)
    ys = _candidates(base, lam, nu.support(), grid_step)
    scale = max(1.0, np.max(np.abs(xs)), np.max(np.abs(ys)), lam)
    # pairs within a few ulps of the band edge are undecidable in floating point
    band = lam - 8 * np.finfo(float).eps * scale
    best, i, j = kernels.band_max(xs, phi(xs), ys, psi(ys), band)
    feasible = bool(best <= tol)
    pair = None if feasible or i < 0 else (float(xs[i]), float(ys[j]))
    return DualReport(feasible, float(best), pair, dual_value(phi, psi, mu, nu), float(lam), tol)


def b_r_set(phi: BVPotential, psi: BVPotential, lam: float, x: float, tol: float = REPORT_TOL) -> IntervalUnion:
    """``{y in [x - lam, x + lam] : phi(x) + psi(y) = 0}`` from the affine pieces of ``psi``."""
    target = -float(phi(x))
    w0, w1 = x - lam, x + lam
    starts = [-np.inf] + list(psi.xs)
    values = [psi.value_left] + list(psi.values)
    slopes = [0.0] + list(psi.slopes)
    parts = []
    for k, s in enumerate(starts):
        e = starts[k + 1] if k + 1 < len(starts) else np.inf
        lo, hi = max(s, w0), min(e, w1)
        if lo > hi:
            continue
        val, slope = values[k], slopes[k]
        ref = s if np.isfinite(s) else lo
        if slope == 0.0:
            if abs(val - target) <= tol:
                if hi == e:
                    # right end belongs to the next piece
                    if lo < hi:
                        parts.append((lo, hi))
                else:
                    parts.append((lo, hi))
            continue
        if np.isfinite(s) and w0 <= s <= w1 and abs(val - target) <= tol:
            parts.append((s, s))
        y = ref + (target - val) / slope
        slack = 1e-12 * max(1.0, abs(y))
        if lo - slack <= y <= hi + slack:
            y = min(max(y, lo), hi)
        if lo <= y <= hi and y < e and abs(float(psi(y)) - target) <= tol:
            parts.append((y, y))
    return IntervalUnion.from_intervals(parts, tol=1e-12 * max(1.0, abs(x)))


@dataclass(frozen=True)
class CriticalityWitness:
    """Indicator pair ``phi = 1_S``, ``psi = -1_{S^lam}`` with ``S = [lo, hi]``."""

    lo: float
    hi: float
    value: float
    lam: float
    found: bool

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "value": self.value, "lambda": self.lam, "found": self.found}


def criticality_witness(
    mu: Measure1D,
    nu: Measure1D,
    lam: float,
    grid_step: Optional[float] = None,
    tol: float = REPORT_TOL,
) -> CriticalityWitness:
    """Best interval ``S`` for ``mu(S) - nu([inf S - lam, sup S + lam])``.

    The objective splits as ``A(hi) + B(lo)`` with ``A, B`` piecewise linear, so
    searching ``lo <= hi`` over the union of their breakpoints is exhaustive;
    ``grid_step`` adds a uniform grid on top. ``found`` is set when the best
    value exceeds ``tol``, which can only happen for ``lam`` below the critical
    distance.
    """
    if lam < 0:
        raise InputError("lambda must be nonnegative")
    nb = nu.breakpoints()
    pts = [mu.breakpoints(), nb + lam, nb - lam]
    if grid_step:
        pts.append(np.arange(mu.lo, mu.hi + grid_step, grid_step))
    cand = np.unique(np.concatenate(pts))
    cand = cand[(cand >= mu.lo) & (cand <= mu.hi)]
    a_hi = mu.cdf(cand) - nu.cdf(cand + lam)
    b_lo = nu.cdf(cand - lam) - mu.cdf(cand)
    pref_arg = np.zeros(len(cand), dtype=np.int64)
    for k in range(1, len(cand)):
        prev = pref_arg[k - 1]
        pref_arg[k] = k if b_lo[k] > b_lo[prev] else prev
    totals = a_hi + b_lo[pref_arg]
    h = int(np.argmax(totals))
    lo, hi = float(cand[pref_arg[h]]), float(cand[h])
    value = float(mu.mass_in(lo, hi) - nu.mass_in(lo - lam, hi + lam))
    return CriticalityWitness(lo, hi, value, float(lam), value > tol)


# --------------------------------------------------------------------------
# one-call construction


@dataclass(frozen=True)
class PotentialPair:
    lambda_c: float
    sets: Optional[DisplacementSets]
    rho: Optional[SignedMeasure1D]
    phi: BVPotential
    psi: BVPotential
    cfg: RhoConfig = field(default_factory=RhoConfig)


def kantorovich_potentials(mu: Measure1D, nu: Measure1D, cfg: RhoConfig = RhoConfig()) -> PotentialPair:
    """Monotone plan, critical distance, displacement sets and ``(phi_r, psi_r)``.

    When the measures coincide the critical distance is 0 and the pair is ``(0, 0)``.
    """
    plan = monotone_coupling(mu, nu)
    lam = winf_value(plan)
    try:
        sets = maximal_displacement_sets(plan, lam)
    except DegenerateCritical:
        zero = BVPotential.constant(0.0)
        return PotentialPair(lam, None, None, zero, zero, cfg)
    rho = build_rho(sets, cfg)
    phi = build_phi(rho)
    return PotentialPair(lam, sets, rho, phi, build_psi(phi, lam), cfg)
