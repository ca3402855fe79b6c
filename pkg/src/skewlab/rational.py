"""Exact rationals, continued fractions and convergents.

Rationals are :class:`fractions.Fraction`. An irrational rotation number is
stood in for by a finite list of partial quotients ``a_1..a_N``; the number
in play is the exact value of that finite expansion

    alpha = 1 / (a_1 + 1 / (a_2 + ... + 1 / a_N)).

Convergents are indexed from the first partial quotient: ``p_1/q_1 = 1/a_1``.
Only levels ``1 <= n <= N - 2`` are treated as valid for lemma checks, so
``||q_n alpha||`` is never zero there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Iterable, Sequence


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class HorizonError(ValueError):
    """A convergent level beyond the valid horizon was requested."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(r: Fraction) -> str:
    """Serialize as ``"p/q"``; integers keep the ``/1`` for uniformity."""
    return f"{r.numerator}/{r.denominator}"


def parse_fraction(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational 'p/q': {text!r}") from exc


def frac_part(r: Fraction) -> Fraction:
    """``r mod 1`` in [0, 1)."""
    return r - floor(r)


def dist_nearest_int(r: Fraction) -> Fraction:
    """Distance from ``r`` to the nearest integer, in [0, 1/2]."""
    t = frac_part(r)
    return min(t, 1 - t)


@dataclass(frozen=True)
class ContinuedFraction:
    """Finite continued fraction ``[a_1, ..., a_N]`` of a number in (0, 1)."""

    partial_quotients: tuple[int, ...]

    def __post_init__(self):
        pq = tuple(int(a) for a in self.partial_quotients)
        if not pq:
            raise DomainError("continued fraction needs at least one partial quotient")
        if any(a < 1 for a in pq):
            raise DomainError(f"partial quotients must be >= 1, got {list(pq)}")
        object.__setattr__(self, "partial_quotients", pq)

    @classmethod
    def of(cls, quotients: Iterable[int]) -> "ContinuedFraction":
        return cls(tuple(quotients))

    def __len__(self) -> int:
        return len(self.partial_quotients)

    def a(self, n: int) -> int:
        """Partial quotient ``a_n`` (1-based)."""
        if not 1 <= n <= len(self):
            raise HorizonError(f"a_{n} undefined for a length-{len(self)} expansion")
        return self.partial_quotients[n - 1]

    @cached_property
    def convergents(self) -> tuple[tuple[int, int], ...]:
        return tuple(convergents(self))

    def convergent(self, n: int) -> tuple[int, int]:
        """``(p_n, q_n)`` for ``1 <= n <= N``."""
        if not 1 <= n <= len(self):
            raise HorizonError(f"convergent {n} undefined for a length-{len(self)} expansion")
        return self.convergents[n - 1]

    def q(self, n: int) -> int:
        return self.convergent(n)[1]

    @cached_property
    def value(self) -> Fraction:
        return evaluate(self.partial_quotients)

    @property
    def horizon(self) -> int:
        """Largest level valid for lemma checks (``N - 2``)."""
        return len(self) - 2

    def check_level(self, n: int) -> None:
        if not 1 <= n <= self.horizon:
            raise HorizonError(
                f"level n={n} outside the valid range 1..{self.horizon} "
                f"for a length-{len(self)} expansion"
            )

    def valid_levels(self) -> range:
        return range(1, self.horizon + 1)

    def is_canonical(self) -> bool:
        return len(self) == 1 or self.partial_quotients[-1] >= 2

    def to_list(self) -> list[int]:
        return list(self.partial_quotients)


def evaluate(quotients: Sequence[int]) -> Fraction:
    """Exact value of ``[a_1, ..., a_N]``."""
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    return x


def cf_from_rational(r) -> ContinuedFraction:
    """Canonical continued fraction of a rational in (0, 1) by Euclid.

    >>> cf_from_rational(Fraction(5, 8)).partial_quotients
    (1, 1, 1, 2)
    """
    r = as_fraction(r)
    if not 0 < r < 1:
        raise DomainError(f"expected 0 < r < 1, got {r}")
    quotients = []
    num, den = r.denominator, r.numerator  # expand 1/r
    while den:
        a, rem = divmod(num, den)
        quotients.append(a)
        num, den = den, rem
    return ContinuedFraction(tuple(quotients))


def canonicalize(quotients: Sequence[int]) -> tuple[int, ...]:
    """Fold a trailing ``1`` into its predecessor: ``[.., a, 1] -> [.., a+1]``."""
    q = list(quotients)
    if len(q) > 1 and q[-1] == 1:
        q[-2] += 1
        q.pop()
    return tuple(q)


def convergents(cf: ContinuedFraction) -> list[tuple[int, int]]:
    """All convergents ``(p_n, q_n)``, n = 1..N, by the three-term recurrence."""
    p_prev, p = 1, 0  # p_{-1}, p_0
    q_prev, q = 0, 1  # q_{-1}, q_0
    out = []
    for a in cf.partial_quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def qn_alpha_distance(cf: ContinuedFraction, n: int) -> Fraction:
    """``||q_n alpha||`` for the value of ``cf``."""
    return dist_nearest_int(cf.q(n) * cf.value)


def quality_bound_check(cf: ContinuedFraction, n: int) -> bool:
    """Whether ``q_n ||q_n alpha|| <= 1/a_{n+1}`` holds exactly."""
    cf.check_level(n)
    q = cf.q(n)
    return q * qn_alpha_distance(cf, n) <= Fraction(1, cf.a(n + 1))


def convergent_above(cf: ContinuedFraction, n: int) -> bool:
    """True when ``p_n/q_n`` exceeds alpha.

    Decided by exact comparison. With convergents counted from ``a_1`` this
    is the odd levels; the side of the removed arcs in the good-set
    construction keys off this, not off a parity convention.
    """
    p, q = cf.convergent(n)
    diff = Fraction(p, q) - cf.value
    if diff == 0:
        raise HorizonError(f"p_{n}/q_{n} equals alpha; level {n} is past the horizon")
    return diff > 0
