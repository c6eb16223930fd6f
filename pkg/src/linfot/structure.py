"""Structure of all optimal plans: rigid translations on the maximal displacement
sets plus free band-constrained sub-plans between them.

Plans are handled at desk scale as weighted point clouds: every part of the
decomposition is discretised with equi-quantile points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .coupling import DisplacementSets, maximal_displacement_sets, monotone_coupling, winf_value
from .errors import BandViolation, BudgetExceeded, DegenerateCritical, InputError, MassMismatch
from .measures import DiscretePlan, Measure1D, measure_from_json, support_diameter
from .oracle import band_feasible_coupling, sample_quantile_grid

MASS_TOL = 1e-9
INFCM_BUDGET = 2e9
MAX_TUPLE = 5


@dataclass(frozen=True)
class StructureComponent:
    a: float
    b: float
    c: float
    d: float
    mu_i: Optional[Measure1D]
    nu_i: Optional[Measure1D]

    @property
    def mass(self) -> float:
        return self.mu_i.mass if self.mu_i is not None else 0.0

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "mass_mu": self.mass,
            "mass_nu": self.nu_i.mass if self.nu_i is not None else 0.0,
        }


@dataclass(frozen=True)
class StructureDecomposition:
    mu: Measure1D
    nu: Measure1D
    sets: Optional[DisplacementSets]
    components: tuple[StructureComponent, ...]
    lambda_c: float
    rigid_plus_mass: float = 0.0
    rigid_minus_mass: float = 0.0

    @property
    def trivial(self) -> bool:
        return self.sets is None

    def to_json(self) -> dict:
        return {
            "mu": self.mu.to_json(),
            "nu": self.nu.to_json(),
            "lambda_c": self.lambda_c,
            "m_plus": self.sets.m_plus.to_list() if self.sets else [],
            "m_minus": self.sets.m_minus.to_list() if self.sets else [],
            "rigid_plus_mass": self.rigid_plus_mass,
            "rigid_minus_mass": self.rigid_minus_mass,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StructureDecomposition":
        """Rebuild by recomputing from the stored measures; the stored sets must agree."""
        try:
            mu, nu = measure_from_json(obj["mu"]), measure_from_json(obj["nu"])
        except (KeyError, TypeError) as exc:
            raise InputError("decomposition JSON needs 'mu' and 'nu'") from exc
        dec = decompose(mu, nu)
        stored = DisplacementSets.from_json(obj) if "m_plus" in obj else None
        if dec.sets is not None and stored is not None:
            scale = 1e-9 * max(1.0, abs(dec.lambda_c))
            if not (dec.sets.m_plus.isclose(stored.m_plus, scale) and dec.sets.m_minus.isclose(stored.m_minus, scale)):
                raise InputError("stored displacement sets do not match the measures")
        return dec


def _restrict_or_none(m: Measure1D, lo: float, hi: float) -> Optional[Measure1D]:
    return m.restrict(lo, hi) if hi > lo else None


def decompose(mu: Measure1D, nu: Measure1D, sets: Optional[DisplacementSets] = None) -> StructureDecomposition:
    """Split ``]a, b[ \\ M`` into maximal open intervals and attach their targets ``[c_i, d_i]``.

    ``c_i`` is ``c`` when ``a_i = a``, else ``a_i + lambda`` when ``a_i`` is in M+,
    else ``a_i - lambda``; ``d_i`` follows the mirrored rule with M- checked first.
    """
    a, b, c, d = mu.lo, mu.hi, nu.lo, nu.hi
    if sets is None:
        plan = monotone_coupling(mu, nu)
        lam = winf_value(plan)
        try:
            sets = maximal_displacement_sets(plan, lam)
        except DegenerateCritical:
            comp = StructureComponent(a, b, c, d, mu, nu)
            return StructureDecomposition(mu, nu, None, (comp,), lam)
    lam = sets.lambda_c
    mp, mm = sets.m_plus, sets.m_minus
    components = []
    for ai, bi in sets.m_all.gaps_within(a, b):
        if ai == a:
            ci = c
        elif mp.contains(ai):
            ci = ai + lam
        else:
            ci = ai - lam
        if bi == b:
            di = d
        elif mm.contains(bi):
            di = bi - lam
        else:
            di = bi + lam
        mu_i = _restrict_or_none(mu, ai, bi)
        nu_i = _restrict_or_none(nu, ci, di)
        m_mu = mu_i.mass if mu_i else 0.0
        m_nu = nu_i.mass if nu_i else 0.0
        if abs(m_mu - m_nu) > MASS_TOL:
            raise MassMismatch(f"component ({ai}, {bi}) -> [{ci}, {di}]: masses {m_mu} vs {m_nu}")
        components.append(StructureComponent(ai, bi, ci, di, mu_i, nu_i))
    rp = mu.restrict_union(mp)
    rm = mu.restrict_union(mm)
    return StructureDecomposition(
        mu, nu, sets, tuple(components), lam, rp.mass if rp else 0.0, rm.mass if rm else 0.0
    )


# --------------------------------------------------------------------------
# discretisation and assembly


@dataclass(frozen=True)
class Discretisation:
    """Equi-quantile points of every part of the decomposition at resolution ``n``."""

    rigid: DiscretePlan
    comp_x: tuple[np.ndarray, ...]
    comp_y: tuple[np.ndarray, ...]
    comp_w: tuple[float, ...]
    n: int

    def marginals(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        cw = [np.full(len(p), w) for p, w in zip(self.comp_x, self.comp_w)]
        w = np.concatenate([self.rigid.w, *cw])
        xs = np.concatenate([self.rigid.x, *self.comp_x])
        ys = np.concatenate([self.rigid.y, *self.comp_y])
        return xs, w, ys, w.copy()


def discretise(dec: StructureDecomposition, n: int) -> Discretisation:
    """``n`` points per non-degenerate component of M+ and M- (translated rigidly), and
    ``n`` points on each side of every free component with positive mass."""
    if n < 1:
        raise InputError("n must be >= 1")
    parts = []
    if dec.sets is not None:
        for sign, u in ((1.0, dec.sets.m_plus), (-1.0, dec.sets.m_minus)):
            for lo, hi in u:
                piece = _restrict_or_none(dec.mu, lo, hi)
                if piece is None:
                    continue
                s = sample_quantile_grid(piece, n)
                parts.append(DiscretePlan(s.points, s.points + sign * dec.lambda_c, s.weights))
    rigid = DiscretePlan.concat(parts)
    cx, cy, cw = [], [], []
    for comp in dec.components:
        if comp.mu_i is None or comp.nu_i is None:
            continue
        cx.append(sample_quantile_grid(comp.mu_i, n).points)
        cy.append(sample_quantile_grid(comp.nu_i, n).points)
        cw.append(comp.mass / n)
    return Discretisation(rigid, tuple(cx), tuple(cy), tuple(cw), n)


def default_tolerance(dec: StructureDecomposition, n: int) -> float:
    """Validation slack ``2 * diameter / n`` for plans discretised at resolution ``n``."""
    return 2.0 * support_diameter(dec.mu, dec.nu) / n


def band_tolerance(dec: StructureDecomposition) -> float:
    """A few ulps: quantile samples of the monotone plan sit exactly on the band edge
    in real arithmetic and must stay admissible after rounding."""
    scale = max(1.0, abs(dec.mu.lo), abs(dec.mu.hi), abs(dec.nu.lo), abs(dec.nu.hi))
    return 64 * np.finfo(float).eps * scale


def monotone_sub_plans(dec: StructureDecomposition, n: int) -> list[DiscretePlan]:
    disc = discretise(dec, n)
    return [DiscretePlan(x, y, np.full(len(x), w)) for x, y, w in zip(disc.comp_x, disc.comp_y, disc.comp_w)]


def random_sub_plans(dec: StructureDecomposition, n: int, seed: int) -> list[DiscretePlan]:
    """Seeded band-feasible couplings of every free component."""
    disc = discretise(dec, n)
    tol = band_tolerance(dec)
    rng = np.random.default_rng(seed)
    out = []
    for x, y, w in zip(disc.comp_x, disc.comp_y, disc.comp_w):
        p = band_feasible_coupling(x, y, dec.lambda_c, int(rng.integers(2**63 - 1)), tol)
        out.append(DiscretePlan(p.x, p.y, np.full(len(x), w)))
    return out


def assemble_plan(
    dec: StructureDecomposition, sub_plans: list[DiscretePlan], n: int, tol: Optional[float] = None
) -> DiscretePlan:
    """Rigid translations on M+ and M- plus one sub-plan per free component.

    Each sub-plan must couple exactly the ``n``-point discretisations of its
    component and stay within ``lambda_c + tol`` of the diagonal.
    """
    disc = discretise(dec, n)
    tol = band_tolerance(dec) if tol is None else tol
    if len(sub_plans) != len(disc.comp_x):
        raise InputError(f"expected {len(disc.comp_x)} sub-plans, got {len(sub_plans)}")
    for k, (sp, x, y, w) in enumerate(zip(sub_plans, disc.comp_x, disc.comp_y, disc.comp_w)):
        if len(sp) and sp.max_displacement() > dec.lambda_c + tol:
            raise BandViolation(f"sub-plan {k} moves mass by {sp.max_displacement()} > {dec.lambda_c}")
        ww = np.full(len(x), w)
        sp.check_marginals(x, ww, y, ww, tol=MASS_TOL)
    plan = DiscretePlan.concat([disc.rigid, *sub_plans])
    return DiscretePlan(plan.x, plan.y, plan.w, {"n": n})


# --------------------------------------------------------------------------
# validation


def validate_plan(plan: DiscretePlan, dec: StructureDecomposition, tol: Optional[float] = None) -> dict:
    """Membership test for the set of optimal plans, with violation mass per check.

    ``rigid``: atoms with ``x`` in M+ (resp. M-) must sit on ``y = x + lambda``
    (resp. ``x - lambda``); points of both sets may use either line.
    ``confinement``: atoms with ``x`` in ``]a_i, b_i[`` must have ``y`` in ``[c_i, d_i]``.
    ``band``: ``|y - x| <= lambda``. All comparisons allow ``tol``.
    """
    if tol is None:
        tol = default_tolerance(dec, int(plan.meta.get("n", 500)))
    x, y, w = plan.x, plan.y, plan.w
    lam = dec.lambda_c
    on_plus = np.abs(y - (x + lam)) <= tol
    on_minus = np.abs(y - (x - lam)) <= tol
    if dec.sets is not None:
        in_plus = dec.sets.m_plus.contains(x)
        in_minus = dec.sets.m_minus.contains(x)
    else:
        in_plus = in_minus = np.zeros(len(x), dtype=bool)
    in_m = in_plus | in_minus
    rigid_bad = in_m & ~((in_plus & on_plus) | (in_minus & on_minus))

    conf_bad = np.zeros(len(x), dtype=bool)
    on_edge = np.zeros(len(x), dtype=bool)
    for comp in dec.components:
        inside = (x > comp.a) & (x < comp.b) & ~in_m
        conf_bad |= inside & ((y < comp.c - tol) | (y > comp.d + tol))
        on_edge |= ((x == comp.a) | (x == comp.b)) & ~in_m
    band_bad = np.abs(y - x) > lam + tol

    def mass(mask):
        return float(w[mask].sum())

    checks = {
        "rigid": {"violation_mass": mass(rigid_bad), "violating_atoms": int(rigid_bad.sum())},
        "confinement": {"violation_mass": mass(conf_bad), "violating_atoms": int(conf_bad.sum())},
        "band": {"violation_mass": mass(band_bad), "violating_atoms": int(band_bad.sum())},
    }
    return {
        "passed": all(c["violating_atoms"] == 0 for c in checks.values()),
        "checks": checks,
        "max_displacement": plan.max_displacement(),
        "lambda_c": lam,
        "tol": tol,
        "endpoint_atoms": int(on_edge.sum()),
    }


def infcm_check(plan: DiscretePlan, max_tuple: int = 4, budget: float = INFCM_BUDGET, tol: Optional[float] = None) -> dict:
    """Search tuples of up to ``max_tuple`` atoms for a cycle shortening the largest displacement.

    Work grows like ``atoms**3 * max_tuple``; beyond ``budget`` the check refuses.
    """
    if max_tuple < 1:
        raise InputError("max_tuple must be >= 1")
    n = len(plan)
    if max_tuple > MAX_TUPLE or float(n) ** 3 * max_tuple > budget:
        raise BudgetExceeded(f"{n} atoms with tuples of length {max_tuple} exceed the enumeration budget")
    if tol is None:
        scale = max(1.0, float(np.max(np.abs(plan.x), initial=0.0)), float(np.max(np.abs(plan.y), initial=0.0)))
        tol = 1e-12 * scale
    tup = kernels.infcm_violation(plan.x, plan.y, max_tuple, tol)
    return {
        "passed": not tup,
        "max_tuple": max_tuple,
        "atoms": n,
        "violating_tuple": [[float(plan.x[i]), float(plan.y[i])] for i in tup],
    }


def minimal_set_inclusion(plan: DiscretePlan, sets: DisplacementSets, eps: float) -> dict:
    """Every point ``x`` of an ``eps``-grid of M+ (M-) needs an atom within ``eps`` of
    ``(x, x + lambda)`` (``(x, x - lambda)``)."""
    order = np.argsort(plan.x, kind="stable")
    px, py = plan.x[order], plan.y[order]
    out = {}
    for name, u, sign in (("m_plus", sets.m_plus, 1.0), ("m_minus", sets.m_minus, -1.0)):
        grid = u.grid(eps)
        lo = np.searchsorted(px, grid - eps, side="left")
        hi = np.searchsorted(px, grid + eps, side="right")
        uncovered = []
        for g, l, h in zip(grid, lo, hi):
            if not np.any(np.abs(py[l:h] - (g + sign * sets.lambda_c)) <= eps):
                uncovered.append(float(g))
        out[name] = {"grid_points": int(len(grid)), "uncovered": uncovered}
    out["covered"] = not out["m_plus"]["uncovered"] and not out["m_minus"]["uncovered"]
    out["eps"] = eps
    return out
