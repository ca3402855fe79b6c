"""Gluing graphs of cyclic covers and a finite essential-value search.

Gluing ``E`` copies of the base surface along the values of ``f`` mod ``E``
gives a connected surface exactly when the attained values generate
``Z/EZ``. That is checked twice: by breadth-first search on the gluing graph
and by the gcd criterion.

An integer ``E`` is witnessed as a return value for a set ``A`` at time
``i`` when some arc of positive length inside ``A`` maps into ``A`` under
``T^i`` with ergodic sum ``S_i = E`` throughout. Finding one for a given
``A`` is evidence only; essentiality quantifies over every ``A``.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

import numpy as np

from skewlab.circle import CircleIntervalSet, build_A_n, discontinuities
from skewlab.dynamics import Point, StepFunction, SystemConfig, ergodic_sum, iterate
from skewlab.engine import OrbitEngine
from skewlab.lemmas import DEFAULT_GRID, good_level_scan, sample_set
from skewlab.rational import DomainError, format_fraction, frac_part


def attained_values(f: StepFunction) -> set[int]:
    return f.values()


@dataclass(frozen=True)
class GluingGraph:
    E: int
    edges: frozenset[tuple[int, int]]

    def neighbours(self, j: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == j:
                out.append(b)
            if b == j:
                out.append(a)
        return out

    def reachable(self, start: int = 0) -> set[int]:
        adj: dict[int, set[int]] = {j: set() for j in range(self.E)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {start}
        queue = deque([start])
        while queue:
            j = queue.popleft()
            for nb in adj[j]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return seen

    def is_connected(self) -> bool:
        return len(self.reachable(0)) == self.E


def gluing_graph(values: Iterable[int], E: int) -> GluingGraph:
    if E <= 0:
        raise DomainError(f"number of copies must be positive, got {E}")
    edges = set()
    for v in set(values):
        for j in range(E):
            a, b = j, (j + v) % E
            edges.add((min(a, b), max(a, b)))
    return GluingGraph(E, frozenset(edges))


def bezout_connected(values: Iterable[int], E: int) -> bool:
    """Arithmetic criterion: gcd of the values and E is 1."""
    if E <= 0:
        raise DomainError(f"number of copies must be positive, got {E}")
    g = E
    for v in values:
        g = gcd(g, v)
    return g == 1


def gluing_connected(f: StepFunction | Iterable[int], E: int) -> bool:
    """BFS verdict; raises if it ever disagrees with the gcd criterion."""
    values = attained_values(f) if isinstance(f, StepFunction) else set(f)
    verdict = gluing_graph(values, E).is_connected()
    if verdict != bezout_connected(values, E):
        raise AssertionError(f"BFS and gcd criterion disagree for values {sorted(values)}, E={E}")
    return verdict


@dataclass(frozen=True)
class EssentialValueWitness:
    """Arc ``(left, right)`` on ``level`` where ``S_i = E`` and both ends of the
    orbit segment lie in the set. ``left > right`` means the arc wraps."""

    E: int
    i: int
    level: int
    left: Fraction
    right: Fraction
    samples: tuple[Point, ...]

    @property
    def measure(self) -> Fraction:
        return frac_part(self.right - self.left) or Fraction(1)

    def interior(self, x: Fraction) -> bool:
        return 0 < frac_part(x - self.left) < self.measure

    def revalidate(self, cfg: SystemConfig, A: CircleIntervalSet) -> bool:
        if self.measure <= 0 or not self.samples:
            return False
        for p in self.samples:
            if not (A.contains(p) and A.contains(iterate(cfg, p, self.i))):
                return False
            if ergodic_sum(cfg, p, self.i) != self.E:
                return False
        return any(self.interior(p.x) for p in self.samples)

    def to_json(self) -> dict:
        return {
            "E": self.E,
            "i": self.i,
            "level": self.level,
            "left": format_fraction(self.left),
            "right": format_fraction(self.right),
            "measure": format_fraction(self.measure),
            "samples": [{"x": format_fraction(p.x), "level": p.level} for p in self.samples],
        }


def _probe_points(A: CircleIntervalSet, limit: int, grid: int) -> tuple[list[Fraction], list[int], int]:
    s = sample_set(A, limit, grid)
    xs, levels = list(s.xs), list(s.levels)
    arcs = [a for a in A.arcs() if a.length > 0]
    if len(arcs) * A.k <= limit or not xs:
        mids = [(a.left + a.right) / 2 for a in arcs[: max(1, limit // A.k)]]
        for x in mids:
            for lv in range(A.k):
                xs.append(x)
                levels.append(lv)
    order = sorted(range(len(xs)), key=lambda j: (xs[j], levels[j]))
    return [xs[j] for j in order], [levels[j] for j in order], s.grid


def _certify(cfg: SystemConfig, A: CircleIntervalSet, E: int, i: int, x0: Fraction,
             level: int) -> EssentialValueWitness | None:
    """Largest cut-free open arc around ``x0`` on which ``S_i`` and membership are constant."""
    alpha = cfg.rotation
    back = A.rotate(-i * alpha)
    cuts = set(A.cut_points) | set(back.cut_points)
    for d in discontinuities(cfg).points:
        for m in range(i):
            cuts.add(frac_part(d - m * alpha))
    cuts = sorted(cuts)
    hi = bisect_right(cuts, x0)
    left = cuts[hi - 1] if hi > 0 else cuts[-1] - 1
    right = cuts[hi] if hi < len(cuts) else cuts[0] + 1
    if right <= left:
        return None
    mid = frac_part((left + right) / 2)
    probe = Point(mid, level)
    if not (A.contains(probe) and A.contains(iterate(cfg, probe, i))):
        return None
    if ergodic_sum(cfg, probe, i) != E:
        return None
    samples = [probe]
    start = Point(frac_part(x0), level)
    if left < x0 < right and start != probe:
        samples.append(start)
    return EssentialValueWitness(E, i, level, frac_part(left), frac_part(right), tuple(samples))


def essential_value_search(cfg: SystemConfig, A: CircleIntervalSet, E: int, horizon: int,
                           grid: int = DEFAULT_GRID, limit: int = 3000,
                           start: int = 1) -> EssentialValueWitness | None:
    """First time ``start <= i <= horizon`` with a certified return arc carrying ``S_i = E``.

    Probe points (grid points of ``A`` and arc midpoints) are advanced in
    lockstep; at the smallest ``i`` where a probe returns to ``A`` with sum
    ``E`` the surrounding arc is certified exactly. ``None`` means nothing
    was found up to the horizon, not that ``E`` is not essential.
    """
    if A.measure() == 0:
        raise DomainError("the set must have positive measure")
    start = max(start, 1)
    if horizon < start:
        return None
    xs, levels, G = _probe_points(A, limit, grid)
    eng = OrbitEngine(cfg, cfg.rotation, [G, A.denom, 2 * A.denom, *(x.denominator for x in xs)])
    X0 = eng.array(xs)
    lev0 = np.array(levels, dtype=np.int64)
    S = np.zeros(len(xs), dtype=np.int64)
    for i0, X, L, _ in eng.blocks(X0, lev0, horizon + 1, levels=not eng.f_level_free):
        fv = eng.f(X, L)
        before = S[None, :] + np.cumsum(fv, axis=0) - fv  # S_i at row time i
        inside = A.member_mask(X, eng.scale)
        hits = inside & (before == E)
        if i0 < start:
            hits[: start - i0] = False
        for r in np.flatnonzero(hits.any(axis=1)):
            i = i0 + int(r)
            for c in np.flatnonzero(hits[r]):
                w = _certify(cfg, A, E, i, xs[c], levels[c])
                if w is not None:
                    return w
        S = before[-1] + fv[-1]
    return None


def candidate_essential_values(cfg: SystemConfig, n: int, limit: int = 10_000,
                               grid: int = DEFAULT_GRID, strict: bool = True) -> Counter:
    """Histogram of ``S_{k q_n}`` over the grid sample of ``A_n``."""
    cf = cfg.require_alpha()
    if strict and n not in good_level_scan(cfg, [n]):
        raise DomainError(f"scan hypotheses do not hold at n={n}")
    A = build_A_n(cfg, n)
    s = sample_set(A, limit, grid, avoid=[cf.q(n)])
    if not len(s):
        return Counter()
    eng = OrbitEngine(cfg, cf.value, [s.grid])
    sums = eng.ergodic_sums(eng.array(s.xs), np.array(s.levels), cfg.k * cf.q(n))
    return Counter(int(v) for v in sums)
