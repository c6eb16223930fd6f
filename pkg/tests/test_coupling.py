import numpy as np
import pytest

from linfot.coupling import (
    DisplacementSets,
    maximal_displacement_sets,
    monotone_coupling,
    reflect,
    reflect_plan,
    winf_value,
)
from linfot.errors import DegenerateCritical
from linfot.instances import e1, e2, e3, e4
from linfot.measures import IntervalUnion, measure_from_pieces

from conftest import random_pairs


def iu(*parts):
    return IntervalUnion(tuple(parts))


def test_translation_map():
    mu, nu = e1()
    plan = monotone_coupling(mu, nu)
    x = np.linspace(0, 1, 11)
    assert np.allclose(plan.transport_map(x), x + 1, atol=1e-15)
    assert winf_value(plan) == 1.0


def test_split_target_map():
    mu, nu = e2()
    plan = monotone_coupling(mu, nu)
    assert np.allclose(plan.transport_map([0.25, 0.75]), [0.25, 0.75])
    assert np.allclose(plan.transport_map([1.25, 1.9]), [3.25, 3.9])
    assert winf_value(plan) == 2.0


def test_identity_coupling_is_degenerate():
    mu = measure_from_pieces([(0, 1, 0.5), (2, 3, 0.5)])
    plan = monotone_coupling(mu, mu)
    assert winf_value(plan) == 0.0
    with pytest.raises(DegenerateCritical):
        maximal_displacement_sets(plan)


@pytest.mark.parametrize(
    "pair, lam, m_plus, m_minus",
    [
        (e1(), 1.0, iu((0.0, 1.0)), iu()),
        (e2(), 2.0, iu((1.0, 2.0)), iu()),
        (e3(), 1.0, iu((0.5, 1.0)), iu((0.0, 0.5))),
        (e4(), 0.5, iu((1.5, 2.0)), iu()),
    ],
    ids=["E1", "E2", "E3", "E4"],
)
def test_displacement_sets(pair, lam, m_plus, m_minus):
    sets = maximal_displacement_sets(monotone_coupling(*pair))
    assert sets.lambda_c == lam
    assert sets.m_plus == m_plus
    assert sets.m_minus == m_minus
    assert sets.m_all == m_plus.union(m_minus)


def test_e3_sets_meet_in_one_point():
    sets = maximal_displacement_sets(monotone_coupling(*e3()))
    assert sets.m_plus.intersection(sets.m_minus) == iu((0.5, 0.5))


def test_reflection():
    assert reflect(measure_from_pieces([(1, 2, 1)])) == measure_from_pieces([(-2, -1, 1)])
    mu, nu = e3()
    assert reflect(reflect(mu)) == mu
    sets = maximal_displacement_sets(monotone_coupling(*e3()))
    mirrored = maximal_displacement_sets(reflect_plan(monotone_coupling(mu, nu)))
    assert mirrored.m_plus == iu((-0.5, 0.0))
    assert mirrored.m_plus == sets.m_minus.reflect()
    assert mirrored.m_minus == sets.m_plus.reflect()


def test_sets_json_round_trip():
    sets = maximal_displacement_sets(monotone_coupling(*e3()))
    back = DisplacementSets.from_json(sets.to_json())
    assert back == sets


@pytest.mark.parametrize("pair", [e1(), e2(), e3(), e4()] + random_pairs(15), ids=lambda _: "")
def test_pushforward_matches_target(pair):
    mu, nu = pair
    plan = monotone_coupling(mu, nu)
    n = 20000
    xs, ys = plan.sample(n)
    grid = np.linspace(nu.lo, nu.hi, 1000)
    empirical = np.searchsorted(ys, grid, side="right") / n
    assert np.max(np.abs(empirical - nu.cdf(grid))) <= 1.0 / n + 1e-9
    mapped = np.sort(plan.transport_map(mu.quantile((np.arange(n) + 0.5) / n)))
    pushed = np.searchsorted(mapped, grid, side="right") / n
    assert np.max(np.abs(pushed - nu.cdf(grid))) <= 1.0 / n + 1e-9
    assert np.all(np.diff(xs) >= 0) and np.all(np.diff(ys) >= 0)


@pytest.mark.parametrize("pair", [e1(), e2(), e3(), e4()] + random_pairs(30), ids=lambda _: "")
def test_gap_and_finiteness(pair):
    sets = maximal_displacement_sets(monotone_coupling(*pair))
    lam = sets.lambda_c
    for x in np.concatenate([sets.m_plus.endpoints(), sets.m_plus.grid(max(sets.m_plus.length(), 1e-9) / 99)]):
        assert not sets.m_minus.intersects_open(x, x + 2 * lam, 1e-12)
    for x in np.concatenate([sets.m_minus.endpoints(), sets.m_minus.grid(max(sets.m_minus.length(), 1e-9) / 99)]):
        assert not sets.m_plus.intersects_open(x - 2 * lam, x, 1e-12)
    inter = sets.m_plus.intersection(sets.m_minus)
    assert all(lo == hi for lo, hi in inter)
    pts = [lo for lo, _ in inter]
    assert all(b - a >= 2 * lam - 1e-12 for a, b in zip(pts, pts[1:]))
