"""Invariant suite shared by ``linfot selftest``.

Each check returns ``(ok, detail)`` for one instance; ``run_suite`` runs them
all over a list of named instances.
"""
from __future__ import annotations

import numpy as np

from .coupling import monotone_coupling, winf_value
from .measures import DiscretePlan, IntervalUnion, Measure1D, support_diameter
from .oracle import sample_quantile_grid, sorted_matching_bottleneck, threshold_matching_bottleneck
from .potentials import (
    REPORT_TOL,
    PotentialPair,
    b_r_set,
    check_dual_feasibility,
    criticality_witness,
    kantorovich_potentials,
)
from .structure import (
    assemble_plan,
    decompose,
    default_tolerance,
    infcm_check,
    minimal_set_inclusion,
    random_sub_plans,
    validate_plan,
)


def check_winf(mu: Measure1D, nu: Measure1D, n: int = 1000):
    lam = winf_value(monotone_coupling(mu, nu))
    xs, ys = sample_quantile_grid(mu, n), sample_quantile_grid(nu, n)
    s, t = sorted_matching_bottleneck(xs, ys), threshold_matching_bottleneck(xs, ys)
    tol = 2 * support_diameter(mu, nu) / n
    return s == t and abs(lam - s) <= tol, {"lambda_c": lam, "sorted": s, "threshold": t, "tol": tol}


def check_duality(mu, nu, pp: PotentialPair, tol: float = REPORT_TOL):
    rep = check_dual_feasibility(pp.phi, pp.psi, pp.lambda_c, mu, nu, grid_step=1e-3, tol=tol)
    return rep.feasible and abs(rep.dual_value) <= tol, rep.to_json()


def check_support_identity(pp: PotentialPair):
    if pp.sets is None:
        return True, {"degenerate": True}
    d = pp.phi.derivative_support()
    dneg = pp.phi.negative_derivative_support()
    ok = d == pp.sets.m_all and dneg == pp.sets.m_plus
    return ok, {"derivative_support": d.to_list(), "negative_part_support": dneg.to_list()}


def check_jumps(pp: PotentialPair):
    if pp.sets is None:
        return True, {}
    gaps = {}
    for x in pp.sets.m_plus.endpoints():
        if not pp.sets.m_minus.contains(x):
            gaps[x] = float(pp.phi.left_limit(x) - pp.phi(x))
    ok = all(g >= pp.cfg.endpoint_weight for g in gaps.values())
    return ok, {"gaps": [[x, g] for x, g in gaps.items()]}


def check_b_r(pp: PotentialPair, points: int = 100):
    if pp.sets is None or not pp.sets.m_plus:
        return True, {"checked": 0}
    lam = pp.lambda_c
    grid = _grid(pp.sets.m_plus, points)
    bad = []
    for x in grid:
        got = b_r_set(pp.phi, pp.psi, lam, x)
        if not got.isclose(IntervalUnion(((x + lam, x + lam),)), 1e-12 * max(1.0, abs(x) + lam)):
            bad.append([float(x), got.to_list()])
    return not bad, {"checked": len(grid), "failures": bad[:5]}


def _grid(u: IntervalUnion, points: int) -> np.ndarray:
    total = u.length()
    if total == 0:
        return np.array(u.endpoints())
    return np.unique(np.concatenate([u.grid(total / (points - 1)), u.endpoints()]))


def check_gaps(pp: PotentialPair):
    """Gap of ``2 lambda`` between M+ and later M-, and finiteness of M+ ∩ M-."""
    if pp.sets is None:
        return True, {}
    sets, lam = pp.sets, pp.lambda_c
    tol = 1e-12 * max(1.0, lam)
    bad = []
    for x in _grid(sets.m_plus, 100):
        if sets.m_minus.intersects_open(x, x + 2 * lam, tol):
            bad.append(["plus", float(x)])
    for x in _grid(sets.m_minus, 100):
        if sets.m_plus.intersects_open(x - 2 * lam, x, tol):
            bad.append(["minus", float(x)])
    inter = sets.m_plus.intersection(sets.m_minus)
    zs = [lo for lo, hi in inter]
    finite = all(lo == hi for lo, hi in inter) and all(b - a >= 2 * lam - tol for a, b in zip(zs, zs[1:]))
    return not bad and finite, {"gap_failures": bad[:5], "intersection": inter.to_list()}


def check_structure(mu, nu, n: int = 500, seeds: int = 5):
    dec = decompose(mu, nu)
    cd = sorted((c.c, c.d) for c in dec.components if c.mass > 0)
    disjoint = all(d0 <= c1 + 1e-12 for (_, d0), (c1, _) in zip(cd, cd[1:]))
    balanced = all(abs(c.mass - (c.nu_i.mass if c.nu_i else 0.0)) <= 1e-9 for c in dec.components)
    plans_ok, covered = True, True
    for seed in range(seeds):
        plan = assemble_plan(dec, random_sub_plans(dec, n, seed), n)
        plans_ok &= validate_plan(plan, dec)["passed"]
        if dec.sets is not None:
            covered &= minimal_set_inclusion(plan, dec.sets, default_tolerance(dec, n))["covered"]
    ok = disjoint and balanced and plans_ok and covered
    return ok, {"components": len(dec.components), "disjoint": disjoint, "balanced": balanced, "plans_valid": plans_ok, "covered": covered}


def check_infcm(mu, nu, atoms: int = 200):
    x, y = monotone_coupling(mu, nu).sample(atoms)
    rep = infcm_check(DiscretePlan(x, y, np.full(atoms, 1.0 / atoms)), 4)
    counter = infcm_check(DiscretePlan([0.0, 1.0], [2.0, 1.0], [0.5, 0.5]), 4)
    return rep["passed"] and not counter["passed"], {"monotone": rep["passed"], "transposition_rejected": not counter["passed"]}


def check_witness(mu, nu, lam_c: float):
    if lam_c == 0:
        return True, {}
    sub = criticality_witness(mu, nu, 0.9 * lam_c)
    crit = criticality_witness(mu, nu, lam_c)
    return not crit.found, {"sub_critical": sub.to_json(), "critical": crit.to_json()}


def run_suite(instances: dict[str, tuple[Measure1D, Measure1D]]) -> dict:
    out = {}
    for name, (mu, nu) in instances.items():
        pp = kantorovich_potentials(mu, nu)
        results = {
            "winf": check_winf(mu, nu),
            "duality": check_duality(mu, nu, pp),
            "support_identity": check_support_identity(pp),
            "jumps": check_jumps(pp),
            "b_r": check_b_r(pp),
            "gaps": check_gaps(pp),
            "structure": check_structure(mu, nu),
            "infcm": check_infcm(mu, nu),
            "witness": check_witness(mu, nu, pp.lambda_c),
        }
        out[name] = {k: {"ok": bool(ok), "detail": det} for k, (ok, det) in results.items()}
    return out
