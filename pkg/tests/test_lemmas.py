from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewlab.circle import build_A_n, discontinuities, good_set_lower_bound
from skewlab.dynamics import Point, ergodic_sum, iterate
from skewlab.lemmas import (
    DEGENERATE,
    FAIL,
    LEMMAS,
    PASS,
    PRECONDITION,
    Samples,
    attained_sigma_values,
    check_near_invariance,
    check_sigma_constancy,
    check_spread_bound,
    check_spread_koksma,
    good_level_scan,
    is_n_good,
    is_n_spread_out,
    koksma_check,
    koksma_inequality_holds,
    n_good_failure,
    n_good_mask,
    near_rigidity_check,
    quasi_rigidity_check,
    run_checks,
    sample_set,
    samples_for,
    sigma_by_enumeration,
    sigma_n,
    spread_out_mask,
)
from skewlab.rational import HorizonError, convergent_above, dist_nearest_int, qn_alpha_distance

from conftest import make_cfg

F = Fraction
ZERO = ((F(0), 0),)


def brute_spread_out(cfg, n, p):
    """Oracle: q per level, and on each level a grid anchored at one of its
    own points (as a closed left end or a closed right end) with one point per cell."""
    q = cfg.alpha.q(n)
    pts = {lv: [] for lv in range(cfg.k)}
    r = p
    for _ in range(cfg.k * q):
        pts[r.level].append(r.x)
        r = iterate(cfg, r, 1)
    for xs in pts.values():
        if len(xs) != q:
            return False
        ok = False
        for a in xs:
            for closed_left in (True, False):
                cells = set()
                for y in xs:
                    t = (y - a) % 1 * q
                    c = int(t) if closed_left else (-int(-t) - 1) % q
                    cells.add(c)
                ok = ok or len(cells) == q
        if not ok:
            return False
    return True


# -- n-good --------------------------------------------------------------------

def test_every_good_set_sample_is_n_good(running):
    A, s = samples_for(running, 5, limit=400)
    assert len(s) == 400
    assert (n_good_mask(running, 5, s) == -1).all()
    assert all(is_n_good(running, 5, p) for p in s.points()[:60])


@pytest.mark.parametrize("n", [4, 5])
def test_straddling_point_is_not_n_good(n):
    # T^i p and Q_n^i p land on opposite sides of the indicator end 3/10
    cfg = make_cfg([1, 1, 1, 1, 40, 30, 40, 1, 1], beta="3/10")
    assert convergent_above(cfg.alpha, n) == (n % 2 == 1)
    i = cfg.k * cfg.alpha.q(n) - 1
    drift = i * (F(*cfg.alpha.convergent(n)) - cfg.alpha.value)
    p = Point((F(3, 10) - i * cfg.alpha.value - drift / 2) % 1, 0)
    assert not build_A_n(cfg, n).contains(p)
    j = n_good_failure(cfg, n, p)
    assert j is not None and j <= i
    assert not is_n_good(cfg, n, p)


def test_short_orbit_is_n_good():
    cfg = make_cfg([1, 5, 7, 3], beta="1/10")  # q_1 = 1, Q_1 is the identity on x
    assert cfg.alpha.q(1) == 1
    assert is_n_good(cfg, 1, Point(F(9, 10), 0))


def test_n_good_refuses_past_horizon(running):
    with pytest.raises(HorizonError):
        is_n_good(running, 11, Point(F(0), 0))


@given(st.lists(st.integers(0, 1008), min_size=1, max_size=25, unique=True))
def test_vectorized_n_good_matches_scalar(ts):
    cfg = make_cfg([1, 2, 3, 1, 12, 1, 1, 2], beta="3/10")
    s = Samples(tuple(F(t, 1009) for t in ts), tuple(t % 3 for t in ts), 1009, len(ts))
    first = n_good_mask(cfg, 4, s)
    scalar = [n_good_failure(cfg, 4, p) for p in s.points()]
    assert list(first) == [-1 if j is None else j for j in scalar]


# -- sigma -----------------------------------------------------------------------

def test_sigma_examples():
    cfg = make_cfg([1, 1, 1, 1, 40, 30], beta="3/10")
    assert cfg.alpha.q(4) == 5
    seen = {sigma_n(cfg, 4, F(j, 997)).value for j in range(997)}
    assert seen == {1, 2} and sigma_n(cfg, 4, 0).M == 1
    cfg = make_cfg([1, 1, 1, 1, 40, 30], beta="2/5")
    assert {sigma_n(cfg, 4, F(j, 997)).value for j in range(997)} == {2}
    values, edge = attained_sigma_values(cfg, 4)
    assert values == {2} and edge
    cfg = make_cfg([1, 1, 1, 1, 40, 30], beta="1/20")
    assert sigma_n(cfg, 4, F(1, 10)).value == 0 == sigma_n(cfg, 4, F(1, 10)).M


@given(st.fractions(0, 1, max_denominator=300), st.fractions(0, 1, max_denominator=50).filter(lambda b: 0 < b < 1),
       st.sampled_from([1, 2, 3, 4, 5]))
def test_sigma_closed_form_matches_enumeration(x, beta, n):
    cfg = make_cfg([1, 2, 2, 3, 1, 4, 2], beta=beta, left=F(1, 7))
    s = sigma_n(cfg, n, x)
    assert s.value == sigma_by_enumeration(cfg, n, x)
    assert s.value in (s.M, s.M + 1)


@given(st.fractions(0, 1, max_denominator=60).filter(lambda b: 0 < b < 1), st.sampled_from([2, 3, 4, 5]))
def test_attained_values_match_dense_enumeration(beta, n):
    cfg = make_cfg([1, 2, 2, 3, 1, 4, 2], beta=beta)
    q = cfg.alpha.q(n)
    grid = 2 * q * beta.denominator
    dense = {sigma_n(cfg, n, F(j, grid)).value for j in range(grid)}
    dense |= {sigma_by_enumeration(cfg, n, F(2 * j + 1, 2 * grid)) for j in range(0, grid, max(1, grid // 50))}
    assert attained_sigma_values(cfg, n)[0] == dense


def test_sigma_constant_along_returns(running):
    A, s = samples_for(running, 7, limit=300)
    assert check_sigma_constancy(running, 7, s).status == PASS


# -- spread out and Koksma ---------------------------------------------------------------

@given(st.lists(st.integers(0, 1008), min_size=1, max_size=6, unique=True), st.sampled_from([3, 4, 5]))
def test_spread_out_matches_brute_force(ts, n):
    cfg = make_cfg([1, 1, 2, 1, 12, 1, 1, 2], beta="3/10")
    for t in ts:
        p = Point(F(t, 1009), t % 3)
        assert is_n_spread_out(cfg, n, p) == brute_spread_out(cfg, n, p)


def test_good_samples_with_coprime_sigma_are_spread_out(running):
    A, s = samples_for(running, 5, limit=300)
    mask = spread_out_mask(running, 5, s)
    coprime = [gcd(sigma_n(running, 5, x).value, 3) == 1 for x in s.xs]
    assert all(m for m, c in zip(mask, coprime) if c)
    for p in s.points()[:20]:
        assert brute_spread_out(running, 5, p) == is_n_spread_out(running, 5, p)


def test_tiny_indicator_is_not_spread_out():
    cfg = make_cfg([1, 1, 1, 1, 40, 30, 40], beta="1/100000")
    n = 4
    assert cfg.indicator.beta < qn_alpha_distance(cfg.alpha, n)
    p = Point(F(1, 2), 0)
    levels = {iterate(cfg, p, i).level for i in range(cfg.k * cfg.alpha.q(n))}
    assert levels == {0}
    assert not is_n_spread_out(cfg, n, p)


def test_single_level_spread_out_iff_good():
    cfg = make_cfg([1, 1, 1, 1, 40, 30, 40], beta="3/10", k=1, pieces=ZERO)
    A, s = samples_for(cfg, 4, limit=200)
    assert (n_good_mask(cfg, 4, s) == -1).all()
    assert spread_out_mask(cfg, 4, s).all()


def test_koksma_examples(running):
    A, s = samples_for(running, 5, limit=50)
    p = next(p for p in s.points() if is_n_spread_out(running, 5, p))
    report = koksma_check(running, 5, p)
    assert report.status == PASS
    S = ergodic_sum(running, p, 3 * running.alpha.q(5))
    assert 1 <= abs(S) <= 24 and S % 2 == 1
    flat = make_cfg(running.alpha.partial_quotients, pieces=ZERO)
    assert koksma_check(flat, 5, p).status == PASS


def test_koksma_precondition_not_failure():
    cfg = make_cfg([1, 1, 1, 1, 40, 30, 40], beta="1/100000")
    r = koksma_check(cfg, 4, Point(F(1, 2), 0))
    assert r.status == PRECONDITION and not r.failed


@given(st.fractions(0, 1, max_denominator=1000), st.integers(1, 40))
def test_koksma_inequality_one_point_per_cell(offset, m):
    from skewlab.dynamics import LevelFunction
    lv = LevelFunction((F(0), F(1, 3), F(5, 7)), (4, -3, 1))
    pts = [(offset / m + F(j, m)) % 1 for j in range(m)]
    assert koksma_inequality_holds(lv, pts)


def test_spread_koksma_on_running(running):
    A, s = samples_for(running, 5, limit=500)
    assert check_spread_koksma(running, 5, s).status == PASS


# -- rigidity and invariance --------------------------------------------------------------

def test_near_rigidity_displacement_is_exact(running):
    A, s = samples_for(running, 7, limit=300)
    r = near_rigidity_check(running, 7, s)
    assert r.status == PASS
    q = running.alpha.q(7)
    for p in s.points()[:10]:
        end = iterate(running, p, 3 * q)
        assert end.level == p.level
        assert dist_nearest_int(end.x - p.x) == dist_nearest_int(3 * q * running.rotation)
        assert dist_nearest_int(end.x - p.x) <= 3 * qn_alpha_distance(running.alpha, 7)


def test_near_rigidity_on_empty_set_is_degenerate(running):
    A, s = samples_for(running, 4)
    assert A.is_empty()
    assert near_rigidity_check(running, 4, s).status == DEGENERATE


def test_quasi_rigidity():
    cfg = make_cfg([1, 1, 1, 1, 40, 30, 40, 1, 1], beta="3/10")
    n = 4
    k, N, a = 3, discontinuities(cfg).N, cfg.alpha.a(n + 1)
    eps = k * (1 - F(k * k * N, a))
    assert eps <= good_set_lower_bound(cfg, n)
    assert quasi_rigidity_check(cfg, n, eps).status == PASS
    assert quasi_rigidity_check(cfg, n, F(7, 2)).status == FAIL
    assert quasi_rigidity_check(cfg, 3, F(1, 100)).status == FAIL  # a_4 = 1: empty set


def test_near_invariance_and_spread_bound(running):
    for n in running.alpha.valid_levels():
        assert check_near_invariance(running, n).status == PASS
        assert check_spread_bound(running, n).status in (PASS, PRECONDITION)


# -- scanner -------------------------------------------------------------------------

def test_scan_finds_planted_level():
    cfg = make_cfg([1, 1, 1, 1, 40, 1, 1, 1], beta="3/10")
    assert cfg.alpha.q(4) == 5
    assert good_level_scan(cfg, cfg.alpha.valid_levels()) == [4]
    assert good_level_scan(cfg, []) == []


def test_scan_excludes_multiple_of_k():
    cfg = make_cfg([1, 1, 1, 1, 40, 1, 1, 1], beta="1/2")  # q beta = 5/2: sigma in {2, 3}
    values, edge = attained_sigma_values(cfg, 4)
    assert values == {2, 3} and not edge
    assert good_level_scan(cfg, [4]) == []


def test_run_checks_order_and_validation(running):
    reports = run_checks(running, [5, 6], ["quality", "near-invariance"])
    assert [(r.n, r.lemma) for r in reports] == [(5, "quality"), (5, "near-invariance"),
                                                 (6, "quality"), (6, "near-invariance")]
    with pytest.raises(ValueError):
        run_checks(running, [5], ["bogus"])
    assert set(LEMMAS) >= {"quality", "spread-koksma"}


def test_failure_reports_carry_witness():
    from skewlab.lemmas import LemmaReport
    r = LemmaReport("good-set", 3, "x", FAIL, {}, {"point": Point(F(1, 3), 1)})
    assert r.failed and r.to_json()["witness"] == {"point": {"x": "1/3", "level": 1}}


def test_sample_set_is_deterministic_and_inside(running):
    A = build_A_n(running, 7)
    s1, s2 = sample_set(A, 500), sample_set(A, 500)
    assert s1 == s2 and len(s1) == 500
    assert all(A.contains(p) for p in s1.points())
