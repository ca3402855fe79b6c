"""Finite unions of arcs on the circle, replicated over the k levels.

A set is stored as a cut of [0, 1) into atoms: the cut points
``0 = e_0 < e_1 < ... < e_m < 1`` and the open gaps between them, each with
its own membership flag. That represents any finite union of arcs with
arbitrary open/closed ends, and boolean operations reduce to evaluating both
operands on the merged cut. Cut points are integers over a common
denominator so that very large unions stay cheap.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from skewlab.dynamics import Point, SystemConfig
from skewlab.rational import (
    DomainError,
    as_fraction,
    convergent_above,
    format_fraction,
    parse_fraction,
    qn_alpha_distance,
)


class ContractError(ValueError):
    """A set violates the structural contract of an operation."""


class Arc(NamedTuple):
    """Arc ``left..right`` inside [0, 1] with explicit end flags."""

    left: Fraction
    right: Fraction
    left_closed: bool = True
    right_closed: bool = False

    @property
    def length(self) -> Fraction:
        return self.right - self.left


def _split_arc(left: int, length: int, lc: bool, rc: bool, denom: int) -> list[tuple]:
    """Integer arc of given length starting at ``left`` mod ``denom``, split at 0."""
    if length <= 0:
        return [(left % denom, left % denom, True, True)] if length == 0 and lc and rc else []
    if length > denom or (length == denom and lc and rc):
        return [(0, denom, True, False)]
    a = left % denom
    b = a + length
    if b < denom:
        return [(a, b, lc, rc)]
    if b == denom:
        pieces = [(a, denom, lc, False)]
        if rc:
            pieces.append((0, 0, True, True))
        return pieces
    return [(a, denom, lc, False), (0, b - denom, True, rc)]


def _merge(arcs: Iterable[tuple]) -> list[list]:
    """Union of integer arcs as sorted disjoint runs ``[l, r, lc, rc]``."""
    runs: list[list] = []
    for a, b, ac, bc in sorted(arcs, key=lambda t: (t[0], not t[2])):
        if runs:
            cur = runs[-1]
            if a < cur[1] or (a == cur[1] and (cur[3] or ac)):
                if b > cur[1]:
                    cur[1], cur[3] = b, bc
                elif b == cur[1]:
                    cur[3] = cur[3] or bc
                continue
        runs.append([a, b, ac, bc])
    return runs


@dataclass(frozen=True)
class CircleIntervalSet:
    """Level-replicated subset of ``S^1 x {0..k-1}``.

    ``cuts`` are numerators over ``denom``; ``cut_in[i]`` is the membership
    of the point ``cuts[i]/denom`` and ``gap_in[i]`` that of the open gap up
    to the next cut (or up to 1).
    """

    k: int
    denom: int
    cuts: tuple[int, ...]
    cut_in: tuple[bool, ...]
    gap_in: tuple[bool, ...]

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, k: int) -> "CircleIntervalSet":
        return cls(k, 1, (0,), (False,), (False,))

    @classmethod
    def full(cls, k: int) -> "CircleIntervalSet":
        return cls(k, 1, (0,), (True,), (True,))

    @classmethod
    def _from_int_arcs(cls, arcs: Iterable[tuple], k: int, denom: int) -> "CircleIntervalSet":
        runs = _merge(arcs)
        cut_in: dict[int, bool] = {0: False}
        gap_after: dict[int, bool] = {}
        for a, b, ac, bc in runs:
            cut_in[a] = cut_in.get(a, False) or ac
            if b > a:
                gap_after[a] = True
            if b < denom:
                cut_in[b] = cut_in.get(b, False) or bc or (a == b and ac)
        cuts = sorted(cut_in)
        return cls._normalized(k, denom, cuts, [cut_in[c] for c in cuts],
                               [gap_after.get(c, False) for c in cuts])

    @classmethod
    def from_arcs(cls, arcs: Iterable, k: int) -> "CircleIntervalSet":
        """Union of arcs given as ``Arc`` or ``(left, right[, lc, rc])`` tuples.

        ``right < left`` denotes an arc wrapping through 0.
        """
        arcs = [Arc(*(as_fraction(v) for v in a[:2]), *a[2:]) for a in arcs]
        denom = lcm(1, *(v.denominator for a in arcs for v in (a.left, a.right)))
        ints = []
        for a in arcs:
            left = a.left * denom
            length = (a.right - a.left) * denom
            if a.right < a.left:
                length += denom
            ints.extend(_split_arc(int(left), int(length), a.left_closed, a.right_closed, denom))
        return cls._from_int_arcs(ints, k, denom)

    @classmethod
    def _normalized(cls, k, denom, cuts, cut_in, gap_in) -> "CircleIntervalSet":
        keep = [i for i in range(len(cuts))
                if i == 0 or not (cut_in[i] == gap_in[i - 1] == gap_in[i])]
        cuts = [cuts[i] for i in keep]
        cut_in = [cut_in[i] for i in keep]
        gap_in = [gap_in[i] for i in keep]
        g = gcd(denom, *cuts)
        if g > 1:
            denom //= g
            cuts = [c // g for c in cuts]
        return cls(k, denom, tuple(cuts), tuple(bool(b) for b in cut_in), tuple(bool(b) for b in gap_in))

    def normalized(self) -> "CircleIntervalSet":
        return self._normalized(self.k, self.denom, list(self.cuts), list(self.cut_in), list(self.gap_in))

    # -- queries ----------------------------------------------------------

    @property
    def cut_points(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.denom) for c in self.cuts)

    def is_empty(self) -> bool:
        return not any(self.cut_in) and not any(self.gap_in)

    def arcs(self) -> list[Arc]:
        """Maximal arcs in [0, 1); arcs through 0 come out split in two."""
        out: list[Arc] = []
        cur: list | None = None
        m = len(self.cuts)
        d = self.denom
        for i, c in enumerate(self.cuts):
            nxt = self.cuts[i + 1] if i + 1 < m else d
            if self.cut_in[i]:
                if cur is None:
                    cur = [c, c, True, True]
                else:
                    cur[1], cur[3] = c, True
            elif cur is not None:
                cur[1], cur[3] = c, False
                out.append(cur)
                cur = None
            if self.gap_in[i]:
                if cur is None:
                    cur = [c, nxt, False, False]
                else:
                    cur[1], cur[3] = nxt, False
            elif cur is not None:
                out.append(cur)
                cur = None
        if cur is not None:
            out.append(cur)
        return [Arc(Fraction(a, d), Fraction(b, d), lc, rc) for a, b, lc, rc in out]

    def wrapped_arcs(self) -> list[Arc]:
        """Like :meth:`arcs` but an arc through 0 is reassembled (``right < left``)."""
        arcs = self.arcs()
        if (len(arcs) >= 2 and arcs[0].left == 0 and arcs[0].left_closed
                and arcs[-1].right == 1 and arcs[-1].length > 0 and arcs[0].length > 0):
            first, last = arcs[0], arcs[-1]
            return [*arcs[1:-1], Arc(last.left, first.right, last.left_closed, first.right_closed)]
        return arcs

    def measure(self) -> Fraction:
        """Total length over all k levels."""
        total = 0
        m = len(self.cuts)
        for i in range(m):
            if self.gap_in[i]:
                nxt = self.cuts[i + 1] if i + 1 < m else self.denom
                total += nxt - self.cuts[i]
        return Fraction(self.k * total, self.denom)

    def contains_x(self, x) -> bool:
        t = as_fraction(x) % 1 * self.denom
        fl = floor(t)
        i = bisect_right(self.cuts, fl) - 1
        if t == fl and self.cuts[i] == fl:
            return self.cut_in[i]
        return self.gap_in[i]

    def contains(self, p: Point) -> bool:
        if not 0 <= p.level < self.k:
            return False
        return self.contains_x(p.x)

    def member_mask(self, xs: np.ndarray, scale: int) -> np.ndarray:
        """Vectorized membership of the points ``xs / scale``.

        ``scale`` must be a multiple of :attr:`denom`.
        """
        if scale % self.denom:
            raise ContractError(f"scale {scale} is not a multiple of the set denominator {self.denom}")
        factor = scale // self.denom
        dtype = xs.dtype
        cuts = np.array([c * factor for c in self.cuts], dtype=dtype)
        idx = np.searchsorted(cuts, xs, side="right") - 1
        on_cut = cuts[idx] == xs
        cut_in = np.array(self.cut_in, dtype=bool)
        gap_in = np.array(self.gap_in, dtype=bool)
        return np.where(on_cut, cut_in[idx], gap_in[idx])

    def component_containing(self, x) -> Arc | None:
        for arc in self.arcs():
            lo_ok = x > arc.left or (x == arc.left and arc.left_closed)
            hi_ok = x < arc.right or (x == arc.right and arc.right_closed)
            if lo_ok and hi_ok:
                return arc
        return None

    # -- algebra ----------------------------------------------------------

    def _rescaled(self, denom: int) -> tuple[list[int], tuple, tuple]:
        f = denom // self.denom
        return [c * f for c in self.cuts], self.cut_in, self.gap_in

    def _combine(self, other: "CircleIntervalSet", op: Callable[[bool, bool], bool]) -> "CircleIntervalSet":
        if self.k != other.k:
            raise ContractError(f"level counts differ: {self.k} vs {other.k}")
        d = lcm(self.denom, other.denom)
        ca, pa, ga = self._rescaled(d)
        cb, pb, gb = other._rescaled(d)
        cuts = sorted(set(ca) | set(cb))

        def at(cs, ps, gs, c):
            i = bisect_left(cs, c)
            if i < len(cs) and cs[i] == c:
                return ps[i], gs[i]
            return gs[i - 1], gs[i - 1]

        cut_in, gap_in = [], []
        for c in cuts:
            pa_, ga_ = at(ca, pa, ga, c)
            pb_, gb_ = at(cb, pb, gb, c)
            cut_in.append(op(pa_, pb_))
            gap_in.append(op(ga_, gb_))
        return self._normalized(self.k, d, cuts, cut_in, gap_in)

    def __or__(self, other):
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other):
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a and not b)

    def __xor__(self, other):
        return self._combine(other, lambda a, b: a != b)

    def complement(self) -> "CircleIntervalSet":
        return CircleIntervalSet(self.k, self.denom, self.cuts,
                                 tuple(not b for b in self.cut_in),
                                 tuple(not b for b in self.gap_in))

    def rotate(self, delta) -> "CircleIntervalSet":
        """Image under ``x -> x + delta mod 1`` on every level."""
        delta = as_fraction(delta) % 1
        d = lcm(self.denom, delta.denominator)
        shift = int(delta * d)
        f = d // self.denom
        ints = []
        for arc in self.arcs():
            left = int(arc.left * self.denom) * f
            length = int(arc.length * self.denom) * f
            ints.extend(_split_arc(left + shift, length, arc.left_closed, arc.right_closed, d))
        return self._from_int_arcs(ints, self.k, d)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list[dict]:
        rows = []
        for level in range(self.k):
            for arc in self.wrapped_arcs():
                rows.append({
                    "level": level,
                    "left": format_fraction(arc.left),
                    "right": format_fraction(arc.right),
                    "left_closed": arc.left_closed,
                    "right_closed": arc.right_closed,
                })
        return rows

    @classmethod
    def from_json(cls, rows: Sequence[dict], k: int) -> "CircleIntervalSet":
        per_level: dict[int, list[Arc]] = {lv: [] for lv in range(k)}
        for row in rows:
            level = int(row["level"])
            if level not in per_level:
                raise ContractError(f"level {level} outside 0..{k - 1}")
            per_level[level].append(Arc(parse_fraction(row["left"]), parse_fraction(row["right"]),
                                        bool(row["left_closed"]), bool(row["right_closed"])))
        sets = [cls.from_arcs(arcs, k) for arcs in per_level.values()]
        if any(s != sets[0] for s in sets[1:]):
            raise ContractError("set is not identical across levels")
        return sets[0]


def measure(s: CircleIntervalSet) -> Fraction:
    return s.measure()


def rotate_set(s: CircleIntervalSet, delta) -> CircleIntervalSet:
    return s.rotate(delta)


def symmetric_difference_measure(s: CircleIntervalSet, t: CircleIntervalSet) -> Fraction:
    return (s ^ t).measure()


def contains(s: CircleIntervalSet, p: Point) -> bool:
    return s.contains(p)


@dataclass(frozen=True)
class DiscontinuityData:
    points: tuple[Fraction, ...]

    @property
    def N(self) -> int:
        return len(self.points)


def discontinuities(cfg: SystemConfig) -> DiscontinuityData:
    """Jumps of f on any level, projected to the circle, plus both indicator ends."""
    pts = set(cfg.f.breakpoints()) | set(cfg.indicator.endpoints())
    return DiscontinuityData(tuple(sorted(pts)))


def removed_arcs(cfg: SystemConfig, n: int) -> tuple[int, list[tuple]]:
    """Integer arcs cut out of the circle to form ``A_n``, with their denominator.

    For each orbit time ``i < k q_n`` and each discontinuity ``d`` the arc of
    length ``k ||q_n alpha||`` on the side of ``d - i alpha`` where the
    approximant overshoots is removed: ``[d - w - i alpha, d - i alpha)`` when
    ``p_n/q_n > alpha``, else ``(d - i alpha, d + w - i alpha]``.
    """
    cf = cfg.require_alpha()
    cf.check_level(n)
    q = cf.q(n)
    width = cfg.k * qn_alpha_distance(cf, n)
    above = convergent_above(cf, n)
    alpha = cf.value
    ds = discontinuities(cfg).points
    denom = lcm(alpha.denominator, width.denominator, *(d.denominator for d in ds))
    a = int(alpha * denom)
    w = int(width * denom)
    dint = [int(d * denom) for d in ds]
    arcs = []
    for i in range(cfg.k * q):
        shift = i * a
        for d in dint:
            if above:
                arcs.extend(_split_arc(d - w - shift, w, True, False, denom))
            else:
                arcs.extend(_split_arc(d - shift, w, False, True, denom))
    return denom, arcs


def build_A_n(cfg: SystemConfig, n: int) -> CircleIntervalSet:
    """The good set ``A_n``: complement of every removed arc, on all levels."""
    denom, arcs = removed_arcs(cfg, n)
    return CircleIntervalSet._from_int_arcs(arcs, cfg.k, denom).complement()


def good_set_lower_bound(cfg: SystemConfig, n: int) -> Fraction:
    """``k (1 - k^2 N q_n ||q_n alpha||)``."""
    cf = cfg.require_alpha()
    N = discontinuities(cfg).N
    return cfg.k * (1 - cfg.k ** 2 * N * cf.q(n) * qn_alpha_distance(cf, n))


def near_invariance_bound(cfg: SystemConfig, n: int) -> Fraction:
    """``2 k^2 N ||q_n alpha||``."""
    cf = cfg.require_alpha()
    N = discontinuities(cfg).N
    return 2 * cfg.k ** 2 * N * qn_alpha_distance(cf, n)


__all__ = [
    "Arc", "CircleIntervalSet", "ContractError", "DiscontinuityData", "DomainError",
    "build_A_n", "contains", "discontinuities", "good_set_lower_bound", "measure",
    "near_invariance_bound", "removed_arcs", "rotate_set", "symmetric_difference_measure",
]
