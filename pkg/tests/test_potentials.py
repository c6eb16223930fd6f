import numpy as np
import pytest

from linfot.coupling import maximal_displacement_sets, monotone_coupling
from linfot.errors import DegenerateCritical, InputError
from linfot.instances import e1, e2, e3, e4
from linfot.measures import BVPotential, IntervalUnion, integrate_bv
from linfot.potentials import (
    RhoConfig,
    b_r_set,
    build_phi,
    build_psi,
    build_rho,
    check_dual_feasibility,
    criticality_witness,
    dual_value,
    kantorovich_potentials,
    window_inf_point,
)
from linfot.coupling import DisplacementSets

from conftest import random_pairs

PAIRS = [e1(), e2(), e3(), e4()] + random_pairs(25)


def sets_of(m_plus, m_minus, lam=1.0):
    mp, mm = IntervalUnion(tuple(m_plus)), IntervalUnion(tuple(m_minus))
    return DisplacementSets(mp, mm, mp.union(mm), lam)


def test_rho_for_pure_translation():
    rho = build_rho(sets_of([(0.0, 1.0)], []))
    assert rho.atoms == ((0.0, 1.0), (1.0, 1.0))
    assert rho.segments == ((0.0, 1.0, 1.0),)
    assert rho.total_variation() == 3.0


def test_rho_sign_symmetry():
    rho = build_rho(sets_of([], [(0.0, 1.0)]))
    assert rho.atoms == ((0.0, -1.0), (1.0, -1.0))
    assert rho.segments == ((0.0, 1.0, -1.0),)


def test_rho_on_e3_with_both_z_conventions():
    sets = sets_of([(0.5, 1.0)], [(0.0, 0.5)])
    proof_weights = build_rho(sets, RhoConfig(z_plus_weight=1, z_minus_weight=2))
    assert proof_weights.atoms == ((0.0, -1.0), (0.5, -1.0), (1.0, 1.0))
    assert proof_weights.segments == ((0.0, 0.5, -1.0), (0.5, 1.0, 1.0))
    assert dict(build_rho(sets).atoms)[0.5] == 1.0


def test_rho_rejects_degenerate_and_bad_config():
    with pytest.raises(DegenerateCritical):
        build_rho(sets_of([], [], lam=0.0))
    with pytest.raises(InputError):
        RhoConfig(endpoint_weight=0)


def test_phi_of_e1():
    phi = kantorovich_potentials(*e1()).phi
    assert phi(-0.1) == 0.0
    assert phi(0.0) == -1.0
    assert phi(0.4) == pytest.approx(-1.4, abs=1e-15)
    assert phi(1.0) == -3.0 and phi(7.0) == -3.0


def test_phi_of_zero_measure():
    from linfot.measures import SignedMeasure1D

    assert build_phi(SignedMeasure1D()) == BVPotential.constant(0.0)


def test_phi_of_e4():
    phi = kantorovich_potentials(*e4()).phi
    assert phi(1.4) == 0.0
    assert phi(1.5) == -1.0
    assert phi(1.75) == -1.25
    assert phi.left_limit(2.0) == -1.5
    assert phi(2.0) == -2.5


def test_psi_examples():
    pp = kantorovich_potentials(*e1())
    assert [float(pp.psi(y)) for y in (1.0, 1.5, 2.0)] == [1.0, 1.5, 3.0]
    assert build_psi(BVPotential.constant(0.0), 0.7) == BVPotential.constant(0.0)
    pp = kantorovich_potentials(*e4())
    assert pp.psi(1.99) == 0.0
    assert pp.psi(2.0) == 1.0
    for y in (2.1, 2.3, 2.45):
        assert pp.psi(y) == pytest.approx(y - 1, abs=1e-15)


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_psi_matches_pointwise_window_infimum(pair):
    mu, nu = pair
    pp = kantorovich_potentials(mu, nu)
    lam = pp.lambda_c
    cuts = np.unique(np.concatenate([np.array(pp.phi.xs) - lam, np.array(pp.phi.xs) + lam]))
    generic = np.concatenate([np.linspace(nu.lo - lam - 1, nu.hi + lam + 1, 400), 0.5 * (cuts[1:] + cuts[:-1])])
    for y in generic:
        assert pp.psi(y) == pytest.approx(window_inf_point(pp.phi, lam, y), abs=1e-12)
    # at the cut points themselves rounding decides which side the window edge
    # falls on; compare with the limit from the right instead
    for y in cuts:
        assert pp.psi(y) == pytest.approx(window_inf_point(pp.phi, lam, y + 1e-10), abs=1e-8)


def test_window_inf_uses_left_limits():
    # -phi has a downward jump at 1 whose left limit is the infimum
    phi = BVPotential.from_breakpoints(0.0, [(0.0, 0.0, -1.0), (1.0, 0.0, 0.0)])
    assert window_inf_point(phi, 0.5, 0.75) == pytest.approx(0.0)
    assert window_inf_point(phi, 0.5, 0.5) == pytest.approx(0.0)
    assert window_inf_point(phi, 0.5, 1.6) == 0.0


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_potentials_are_kantorovich(pair):
    mu, nu = pair
    pp = kantorovich_potentials(mu, nu)
    rep = check_dual_feasibility(pp.phi, pp.psi, pp.lambda_c, mu, nu, grid_step=1e-3)
    assert rep.feasible, rep
    assert rep.worst_violation <= 1e-9
    assert abs(dual_value(pp.phi, pp.psi, mu, nu)) <= 1e-9


def test_constant_violation_is_reported():
    mu, nu = e1()
    rep = check_dual_feasibility(BVPotential.constant(1.0), BVPotential.constant(0.0), 0.3, mu, nu)
    assert not rep.feasible
    assert rep.worst_violation == 1.0
    x, y = rep.violating_pair
    assert abs(y - x) <= 0.3


def test_dual_values():
    mu, nu = e1()
    pp = kantorovich_potentials(mu, nu)
    assert integrate_bv(pp.phi, mu) == pytest.approx(-1.5, abs=1e-12)
    assert integrate_bv(pp.psi, nu) == pytest.approx(1.5, abs=1e-12)
    zero = BVPotential.constant(0.0)
    assert dual_value(zero, zero, mu, nu) == 0.0
    mu, nu = e4()
    pp = kantorovich_potentials(mu, nu)
    assert integrate_bv(pp.phi, mu) == pytest.approx(-0.3125, abs=1e-12)
    assert integrate_bv(pp.psi, nu) == pytest.approx(0.3125, abs=1e-12)


def test_b_r_examples():
    pp = kantorovich_potentials(*e4())
    assert b_r_set(pp.phi, pp.psi, 0.5, 1.5) == IntervalUnion(((2.0, 2.0),))
    assert b_r_set(pp.phi, pp.psi, 0.5, 0.3) == IntervalUnion(((0.3 - 0.5, 0.3 + 0.5),))
    pp = kantorovich_potentials(*e1())
    assert b_r_set(pp.phi, pp.psi, 1.0, 0.5) == IntervalUnion(((1.5, 1.5),))


def test_proof_z_weights_break_b_r_at_the_crossing_point():
    # with rho({1/2}) = -1 the point 1/2 of M+ is not pinned to 1/2 + lambda
    pp = kantorovich_potentials(*e3(), RhoConfig(z_plus_weight=1, z_minus_weight=2))
    assert b_r_set(pp.phi, pp.psi, 1.0, 0.5) == IntervalUnion(((-0.5, 1.5),))
    pp = kantorovich_potentials(*e3())
    assert b_r_set(pp.phi, pp.psi, 1.0, 0.5) == IntervalUnion(((1.5, 1.5),))


def test_witness_examples():
    mu, nu = e1()
    w = criticality_witness(mu, nu, 0.9)
    assert (w.lo, w.hi) == (0.0, 1.0)
    assert w.value == pytest.approx(0.1, abs=1e-12)
    assert not criticality_witness(mu, nu, 1.0).found


def test_witness_beats_exhaustive_grid_on_e2():
    mu, nu = e2()
    lam = 1.5
    w = criticality_witness(mu, nu, lam)
    grid = np.round(np.arange(0, 2.0001, 0.01), 10)
    best = max(mu.mass_in(a, b) - nu.mass_in(a - lam, b + lam) for i, a in enumerate(grid) for b in grid[i:])
    assert w.found
    assert w.value >= best - 1e-12
    assert w.value == pytest.approx(mu.mass_in(w.lo, w.hi) - nu.mass_in(w.lo - lam, w.hi + lam))


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_no_witness_at_critical_distance(pair):
    mu, nu = pair
    lam = kantorovich_potentials(mu, nu).lambda_c
    assert criticality_witness(mu, nu, lam, grid_step=1e-2).value <= 1e-9


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_saturation_along_monotone_plan(pair):
    mu, nu = pair
    pp = kantorovich_potentials(mu, nu)
    plan = monotone_coupling(mu, nu)
    t = (np.arange(1000) + 0.5) / 1000
    x, y = mu.quantile(t), nu.quantile(t)
    gap = np.abs(pp.phi(x) + pp.psi(y))
    # the exceptions are the finitely many levels where the plan jumps
    assert np.count_nonzero(gap > 1e-9) <= len(plan.breakpoints)


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_support_identity_and_local_constancy(pair):
    mu, nu = pair
    pp = kantorovich_potentials(mu, nu)
    assert pp.phi.derivative_support() == pp.sets.m_all
    assert pp.phi.negative_derivative_support() == pp.sets.m_plus
    m_pts = np.array(pp.sets.m_all.endpoints())
    for x in np.linspace(mu.lo, mu.hi, 200):
        if pp.sets.m_all.contains(x):
            continue
        dist = np.min(np.abs(m_pts - x))
        for lo, hi in pp.sets.m_all:
            if lo <= x <= hi:
                dist = 0.0
        delta = 0.5 * dist
        probe = np.linspace(x - 0.999 * delta, x + 0.999 * delta, 7)
        assert np.all(pp.phi(probe) == pp.phi(x))


@pytest.mark.parametrize("pair", PAIRS, ids=lambda _: "")
def test_jumps_at_extreme_points(pair):
    pp = kantorovich_potentials(*pair)
    for x in pp.sets.m_plus.endpoints():
        if not pp.sets.m_minus.contains(x):
            assert pp.phi.left_limit(x) - pp.phi(x) >= 1.0


@pytest.mark.parametrize("c", [0.25, 0.5, 1.0])
def test_scaled_pairs_remain_feasible(c):
    mu, nu = e3()
    pp = kantorovich_potentials(mu, nu)
    rep = check_dual_feasibility(pp.phi.scaled(c), pp.psi.scaled(c), pp.lambda_c, mu, nu)
    assert rep.feasible


def test_degenerate_instance_gives_zero_pair():
    mu, _ = e4()
    pp = kantorovich_potentials(mu, mu)
    assert pp.lambda_c == 0.0
    assert pp.phi == BVPotential.constant(0.0) and pp.psi == BVPotential.constant(0.0)


def test_rho_is_derivative_of_phi():
    pp = kantorovich_potentials(*e3())
    sets = maximal_displacement_sets(monotone_coupling(*e3()))
    assert pp.rho.support(1) == sets.m_plus
    assert pp.rho.support(-1) == sets.m_minus
