import json

import numpy as np
import pytest

from linfot.errors import DomainError, MassNotOne, NegativeDensity, OverlappingPieces
from linfot.instances import e1, e4
from linfot.measures import (
    BVPotential,
    DiscretePlan,
    IntervalUnion,
    SignedMeasure1D,
    cdf_eval,
    integrate_bv,
    measure_from_json,
    measure_from_pieces,
    quantile_eval,
)
from linfot.potentials import kantorovich_potentials

from conftest import random_pairs

SPLIT = [(0, 1, 0.5), (3, 4, 0.5)]


def test_uniform_has_unit_mass():
    assert measure_from_pieces([(0, 1, 1)]).mass == 1.0


def test_two_piece_measure_accepted():
    assert measure_from_pieces(SPLIT).mass == 1.0


def test_unnormalised_measure_reports_mass():
    with pytest.raises(MassNotOne) as exc:
        measure_from_pieces([(0, 1, 2)])
    assert exc.value.mass == 2.0


def test_overlap_and_negative_density_rejected():
    with pytest.raises(OverlappingPieces):
        measure_from_pieces([(0, 1, 0.5), (0.5, 1.5, 0.5)])
    with pytest.raises(NegativeDensity):
        measure_from_pieces([(0, 1, -1), (1, 3, 1)])


def test_zero_density_pieces_pruned():
    m = measure_from_pieces([(0, 1, 1), (1, 2, 0)])
    assert m.pieces == ((0.0, 1.0, 1.0),)


def test_json_reader_reports_bad_piece():
    with pytest.raises(ValueError, match="piece 1"):
        measure_from_json({"pieces": [{"a": 0, "b": 1, "density": 1}, {"a": 1}]})


def test_json_round_trip():
    m = measure_from_pieces(SPLIT)
    assert measure_from_json(json.loads(json.dumps(m.to_json()))) == m


def test_cdf_examples():
    u = measure_from_pieces([(0, 1, 1)])
    assert cdf_eval(u, 0.25) == 0.25
    assert cdf_eval(u, -5) == 0.0
    assert cdf_eval(measure_from_pieces(SPLIT), 2) == 0.5


def test_quantile_examples():
    assert quantile_eval(measure_from_pieces([(1, 2, 1)]), 0.5) == 1.5
    split = measure_from_pieces(SPLIT)
    assert quantile_eval(split, 0.75) == 3.5
    assert quantile_eval(split, 0.0) == 0.0
    # plateau of the cdf resolves to the next piece's left edge
    assert quantile_eval(split, 0.5) == 3.0


def test_quantile_domain():
    with pytest.raises(DomainError):
        quantile_eval(measure_from_pieces([(0, 1, 1)]), 1.5)


@pytest.mark.parametrize("pair", random_pairs(10) + [e4()])
def test_cdf_inverts_quantile_on_grid(pair):
    for m in pair:
        t = np.linspace(0, 1, 1001)
        q = m.quantile(t)
        assert np.all(np.diff(q) >= 0)
        assert np.max(np.abs(m.cdf(q) - t)) <= 1e-12
        x = np.linspace(m.lo - 1, m.hi + 1, 1001)
        assert np.all(np.diff(m.cdf(x)) >= 0)


def test_integrate_phi_of_e1():
    mu, nu = e1()
    pp = kantorovich_potentials(mu, nu)
    exact = integrate_bv(pp.phi, mu)
    assert exact == pytest.approx(-1.5, abs=1e-12)
    # independent midpoint quadrature with 10^6 cells
    x = (np.arange(10**6) + 0.5) / 10**6
    assert np.mean(pp.phi(x)) == pytest.approx(exact, abs=1e-6)


def test_integrate_constant_and_zero():
    m = measure_from_pieces(SPLIT)
    assert integrate_bv(BVPotential.constant(0.0), m) == 0.0
    assert integrate_bv(BVPotential.constant(2.5), m) == pytest.approx(2.5, abs=1e-12)


def test_integrate_is_linear_and_additive():
    f = BVPotential.from_breakpoints(0.0, [(0.2, 1.0, -2.0), (0.7, 3.0, 0.5)])
    g = BVPotential.from_breakpoints(1.0, [(0.5, -1.0, 1.0)])
    m = measure_from_pieces([(0, 1, 0.5), (1, 1.5, 1.0)])
    fg = BVPotential.from_breakpoints(
        1.0, [(x, float(f(x) + g(x)), float((f(x + 1e-3) + g(x + 1e-3) - f(x) - g(x)) / 1e-3)) for x in (0.2, 0.5, 0.7)]
    )
    assert integrate_bv(fg, m) == pytest.approx(integrate_bv(f, m) + integrate_bv(g, m), abs=1e-9)
    left, right = m.restrict(0, 0.6), m.restrict(0.6, 1.5)
    assert integrate_bv(f, m) == pytest.approx(integrate_bv(f, left) + integrate_bv(f, right), abs=1e-12)


def test_bv_potential_evaluation():
    phi = BVPotential.from_breakpoints(0.0, [(0.0, -1.0, -1.0), (1.0, -3.0, 0.0)])
    assert phi(-0.5) == 0.0
    assert phi(0.5) == -1.5
    assert phi(1.0) == -3.0
    assert phi.left_limit(1.0) == -2.0
    assert phi.jump(0.0) == -1.0
    assert phi.total_variation() == 3.0
    assert phi.derivative_support() == IntervalUnion(((0.0, 1.0),))


def test_bv_json_round_trip():
    phi = BVPotential.from_breakpoints(0.5, [(0.0, -1.0, -1.0), (1.0, -3.0, 0.0)])
    assert BVPotential.from_json(json.loads(json.dumps(phi.to_json()))) == phi


def test_interval_union_algebra():
    u = IntervalUnion.from_intervals([(0, 1), (0.5, 2), (3, 3)])
    assert u.components == ((0.0, 2.0), (3.0, 3.0))
    assert u.singletons() == [3.0]
    assert u.intersection(IntervalUnion(((1.5, 3.5),))).components == ((1.5, 2.0), (3.0, 3.0))
    assert u.reflect().components == ((-3.0, -3.0), (-2.0, 0.0))
    assert u.gaps_within(-1, 4) == [(-1, 0.0), (2.0, 3.0), (3.0, 4)]
    assert u.contains(2.5) is False and u.contains(3.0) is True


def test_signed_measure_cumulative():
    rho = SignedMeasure1D(((0.0, 1.0), (1.0, 1.0)), ((0.0, 1.0, 1.0),))
    assert rho.cumulative(0.5) == 1.5
    assert rho.total_variation() == 3.0
    assert rho.support(1) == IntervalUnion(((0.0, 1.0),))


def test_discrete_plan_marginals():
    p = DiscretePlan([0, 0, 1], [1, 2, 2], [0.25, 0.25, 0.5])
    xs, w = p.marginal(0)
    assert xs.tolist() == [0.0, 1.0] and w.tolist() == [0.5, 0.5]
    assert p.max_displacement() == 2.0
    assert DiscretePlan.from_json(p.to_json()) == p
