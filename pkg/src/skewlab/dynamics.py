"""The base map, its periodic approximants and the integer skew product.

The phase space is ``X = S^1 x {0..k-1}``. The base map rotates the circle
coordinate by alpha and moves the fiber index up by one whenever the circle
coordinate lies in the indicator interval::

    T(x, l) = (x + alpha mod 1, l + I(x) mod k)

and the skew product drags an integer along by ``f``::

    T_f(x, l, m) = (T(x, l), m + f(x, l))

All intervals are closed on the left and open on the right.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator, Sequence

from skewlab.rational import (
    ContinuedFraction,
    DomainError,
    as_fraction,
    frac_part,
)


@dataclass(frozen=True, order=True)
class Point:
    x: Fraction
    level: int

    @classmethod
    def make(cls, x, level: int, k: int) -> "Point":
        return cls(frac_part(as_fraction(x)), int(level) % k)


@dataclass(frozen=True)
class SkewState:
    point: Point
    m: int = 0


@dataclass(frozen=True)
class Indicator:
    """Characteristic function of the arc ``[left, left + beta)`` mod 1."""

    beta: Fraction
    left: Fraction = Fraction(0)

    def __post_init__(self):
        beta = as_fraction(self.beta)
        if not 0 < beta < 1:
            raise DomainError(f"indicator length beta must lie in (0, 1), got {beta}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "left", frac_part(as_fraction(self.left)))

    def __call__(self, x: Fraction) -> int:
        return 1 if frac_part(x - self.left) < self.beta else 0

    @property
    def right(self) -> Fraction:
        return frac_part(self.left + self.beta)

    def endpoints(self) -> tuple[Fraction, Fraction]:
        return self.left, self.right


@dataclass(frozen=True)
class LevelFunction:
    """Integer step function on the circle, right-continuous.

    Piece ``i`` is ``[breaks[i], breaks[i+1])``; the last piece wraps round
    to ``breaks[0] + 1``.
    """

    breaks: tuple[Fraction, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.breaks) != len(self.values) or not self.breaks:
            raise DomainError("a level needs matching, nonempty breakpoint and value lists")
        pairs = sorted((frac_part(as_fraction(b)), int(v)) for b, v in zip(self.breaks, self.values))
        bs = tuple(b for b, _ in pairs)
        if len(set(bs)) != len(bs):
            raise DomainError(f"duplicate breakpoints {bs}")
        object.__setattr__(self, "breaks", bs)
        object.__setattr__(self, "values", tuple(v for _, v in pairs))

    @classmethod
    def constant(cls, value: int) -> "LevelFunction":
        return cls((Fraction(0),), (value,))

    def __call__(self, x: Fraction) -> int:
        i = bisect_right(self.breaks, frac_part(x)) - 1
        return self.values[i]  # i == -1 wraps to the last piece

    def lengths(self) -> list[Fraction]:
        b = self.breaks
        if len(b) == 1:
            return [Fraction(1)]
        return [frac_part(b[(i + 1) % len(b)] - b[i]) for i in range(len(b))]

    def integral(self) -> Fraction:
        return sum((v * ln for v, ln in zip(self.values, self.lengths())), Fraction(0))

    def jumps(self) -> list[tuple[Fraction, int]]:
        """``(breakpoint, jump)`` at every breakpoint, read circularly."""
        v = self.values
        return [(b, v[i] - v[i - 1]) for i, b in enumerate(self.breaks)]

    def discontinuities(self) -> list[Fraction]:
        return [b for b, jump in self.jumps() if jump != 0]

    def variation(self) -> int:
        return sum(abs(jump) for _, jump in self.jumps())


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant integer function on ``S^1 x {0..k-1}``, mean zero."""

    levels: tuple[LevelFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise DomainError("step function needs at least one level")
        if self.mean() != 0:
            raise DomainError(f"f must have mean zero, total integral is {self.mean()}")

    @classmethod
    def replicated(cls, pieces: Sequence[tuple], k: int) -> "StepFunction":
        """Same ``(breakpoint, value)`` pieces on each of ``k`` levels."""
        level = LevelFunction(tuple(b for b, _ in pieces), tuple(v for _, v in pieces))
        return cls((level,) * k)

    @classmethod
    def zero(cls, k: int) -> "StepFunction":
        return cls((LevelFunction.constant(0),) * k)

    @property
    def k(self) -> int:
        return len(self.levels)

    def __call__(self, p: Point) -> int:
        return self.levels[p.level](p.x)

    def mean(self) -> Fraction:
        return sum((lv.integral() for lv in self.levels), Fraction(0))

    def values(self) -> set[int]:
        return {v for lv in self.levels for v in lv.values}

    @property
    def all_odd(self) -> bool:
        return all(v % 2 for v in self.values())

    @property
    def values_gcd(self) -> int:
        g = 0
        for v in self.values():
            g = gcd(g, v)
        return g

    def breakpoints(self) -> set[Fraction]:
        return {b for lv in self.levels for b in lv.discontinuities()}


def variation(f: StepFunction) -> int:
    """Sum over levels of the circular total variation."""
    return sum(lv.variation() for lv in f.levels)


@dataclass(frozen=True)
class SystemConfig:
    """Everything defining one skew product.

    ``alpha=None`` gives the degenerate vertical flow (rotation by 0), which
    is only useful for testing; level-indexed operations need a continued
    fraction.
    """

    k: int
    alpha: ContinuedFraction | None
    indicator: Indicator
    f: StepFunction
    odd_mode: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise DomainError(f"k must be odd and positive, got {self.k}")
        if self.f.k != self.k:
            raise DomainError(f"f is defined on {self.f.k} levels, expected k={self.k}")
        if self.odd_mode:
            if not self.f.all_odd:
                raise DomainError(f"odd mode requires odd values of f, got {sorted(self.f.values())}")
            if self.f.values_gcd != 1:
                raise DomainError(f"values of f share the common factor {self.f.values_gcd}")

    @property
    def rotation(self) -> Fraction:
        return Fraction(0) if self.alpha is None else self.alpha.value

    def require_alpha(self) -> ContinuedFraction:
        if self.alpha is None:
            raise DomainError("this operation needs alpha given as a continued fraction")
        return self.alpha

    def point(self, x, level: int = 0) -> Point:
        return Point.make(x, level, self.k)


def _step(cfg: SystemConfig, p: Point, rotation: Fraction) -> Point:
    return Point(frac_part(p.x + rotation), (p.level + cfg.indicator(p.x)) % cfg.k)


def base_step(cfg: SystemConfig, p: Point) -> Point:
    return _step(cfg, p, cfg.rotation)


def inverse_step(cfg: SystemConfig, p: Point) -> Point:
    x = frac_part(p.x - cfg.rotation)
    return Point(x, (p.level - cfg.indicator(x)) % cfg.k)


def periodic_step(cfg: SystemConfig, n: int, p: Point) -> Point:
    """One step of the rational approximant: rotate by ``p_n/q_n`` instead."""
    cf = cfg.require_alpha()
    cf.check_level(n)
    pn, qn = cf.convergent(n)
    return _step(cfg, p, Fraction(pn, qn))


def skew_step(cfg: SystemConfig, s: SkewState) -> SkewState:
    return SkewState(base_step(cfg, s.point), s.m + cfg.f(s.point))


def iterate(cfg: SystemConfig, p: Point, steps: int) -> Point:
    for _ in range(steps):
        p = base_step(cfg, p)
    return p


def orbit(cfg: SystemConfig, p: Point, steps: int) -> Iterator[SkewState]:
    """States ``T_f^i(p, 0)`` for i = 0..steps."""
    s = SkewState(p, 0)
    yield s
    for _ in range(steps):
        s = skew_step(cfg, s)
        yield s


def ergodic_sum(cfg: SystemConfig, p: Point, m: int) -> int:
    """``S_m(p) = sum_{i<m} f(T^i p)``.

    Sums run along the base orbit. Writing ``f(T_f^i p)`` instead gives the
    same number, since ``f`` never looks at the skew coordinate.
    """
    if m < 0:
        raise DomainError(f"ergodic sum length must be >= 0, got {m}")
    total = 0
    for _ in range(m):
        total += cfg.f(p)
        p = base_step(cfg, p)
    return total


def circle_distance(x: Fraction, y: Fraction) -> Fraction:
    d = frac_part(x - y)
    return min(d, 1 - d)


def point_distance(p: Point, q: Point) -> Fraction:
    """Circle distance on a common level; 1 between different levels."""
    if p.level != q.level:
        return Fraction(1)
    return circle_distance(p.x, q.x)
