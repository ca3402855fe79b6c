from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from skewlab.rational import (
    ContinuedFraction,
    DomainError,
    HorizonError,
    canonicalize,
    cf_from_rational,
    convergent_above,
    convergents,
    dist_nearest_int,
    evaluate,
    format_fraction,
    parse_fraction,
    qn_alpha_distance,
    quality_bound_check,
)

quotient_lists = st.lists(st.integers(1, 60), min_size=3, max_size=18)


@pytest.mark.parametrize("r, expected", [
    (Fraction(1, 2), (2,)),
    (Fraction(5, 8), (1, 1, 1, 2)),
    (Fraction(2, 3), (1, 2)),
])
def test_cf_from_rational_examples(r, expected):
    cf = cf_from_rational(r)
    assert cf.partial_quotients == expected
    assert cf.value == r


@pytest.mark.parametrize("r", [Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-1, 3)])
def test_cf_from_rational_rejects_outside_unit_interval(r):
    with pytest.raises(DomainError):
        cf_from_rational(r)


def test_partial_quotients_must_be_positive():
    with pytest.raises(DomainError):
        ContinuedFraction.of([1, 0, 2])
    with pytest.raises(DomainError):
        ContinuedFraction.of([])


@pytest.mark.parametrize("quotients, expected", [
    ([1, 1, 1, 1, 1], [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]),
    ([2], [(1, 2)]),
    ([1, 2], [(1, 1), (2, 3)]),
])
def test_convergents_examples(quotients, expected):
    assert convergents(ContinuedFraction.of(quotients)) == expected


def test_convergents_match_truncations():
    cf = ContinuedFraction.of([3, 7, 15, 1, 292, 1, 1])
    for n, (p, q) in enumerate(cf.convergents, start=1):
        assert Fraction(p, q) == evaluate(cf.partial_quotients[:n])


@pytest.mark.parametrize("r, expected", [
    (Fraction(5, 8), Fraction(3, 8)),
    (Fraction(0), Fraction(0)),
    (Fraction(10, 8), Fraction(1, 4)),
    (Fraction(-7, 3), Fraction(1, 3)),
])
def test_dist_nearest_int(r, expected):
    assert dist_nearest_int(r) == expected


def test_qn_distance_for_five_eighths():
    cf = ContinuedFraction.of([1, 1, 1, 2])
    assert cf.q(2) == 2
    assert qn_alpha_distance(cf, 2) == Fraction(1, 4)


def test_quality_examples():
    assert quality_bound_check(ContinuedFraction.of([1] * 8), 3)
    assert quality_bound_check(ContinuedFraction.of([5, 5, 5, 5]), 1)


def test_quality_refuses_levels_past_horizon():
    cf = ContinuedFraction.of([5, 5, 5, 5])
    assert cf.horizon == 2
    with pytest.raises(HorizonError):
        quality_bound_check(cf, 3)
    with pytest.raises(HorizonError):
        quality_bound_check(cf, 0)


def test_canonical_form():
    assert canonicalize([1, 1, 1, 1]) == (1, 1, 2)
    assert ContinuedFraction.of([1, 1, 1, 2]).is_canonical()
    assert not ContinuedFraction.of([1, 1, 2, 1]).is_canonical()


def test_fraction_text_round_trip():
    assert format_fraction(Fraction(3)) == "3/1"
    assert parse_fraction(" 6/20 ") == Fraction(3, 10)
    with pytest.raises(DomainError):
        parse_fraction("1/0")
    with pytest.raises(DomainError):
        parse_fraction("abc")


@given(quotient_lists)
def test_quality_bound_holds_at_every_valid_level(qs):
    cf = ContinuedFraction.of(qs)
    assert all(quality_bound_check(cf, n) for n in cf.valid_levels())


@given(quotient_lists)
def test_recurrence_invariants(qs):
    from math import gcd
    conv = convergents(ContinuedFraction.of(qs))
    for n, (p, q) in enumerate(conv, start=1):
        assert gcd(p, q) == 1
        if n >= 3:
            assert q > conv[n - 2][1]
            a = qs[n - 1]
            assert p == a * conv[n - 2][0] + conv[n - 3][0]
            assert q == a * conv[n - 2][1] + conv[n - 3][1]


@given(quotient_lists)
def test_convergent_side_follows_odd_levels(qs):
    # counted from a_1, the odd convergents lie above alpha
    cf = ContinuedFraction.of(qs)
    for n in cf.valid_levels():
        assert convergent_above(cf, n) == (n % 2 == 1)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(lambda r: 0 < r < 1))
def test_expansion_round_trip(r):
    cf = cf_from_rational(r)
    assert cf.is_canonical()
    assert cf.value == r
    assert cf_from_rational(cf.value) == cf
