"""Vectorized exact orbits on a rational lattice.

Every circle coordinate in play (rotation, breakpoints, indicator ends,
sample points) has a denominator dividing one integer ``scale``, so an orbit
is integer addition modulo ``scale``. Blocks of consecutive times are
evaluated at once: positions by an outer sum, fiber levels by a cumulative
sum of indicator hits. Arrays are int64 when the lattice fits, Python-int
object arrays otherwise, so results are exact either way.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Sequence

import numpy as np

from skewlab.dynamics import SystemConfig

_INT64_LIMIT = 2**62
_BLOCK_ELEMENTS = 2_000_000


def piece_index(X: np.ndarray, cuts: np.ndarray) -> np.ndarray:
    """Index ``j`` with ``cuts[j] <= X < cuts[j+1]``; ``cuts[0]`` must be 0."""
    if len(cuts) <= 8 and X.dtype != object:
        idx = np.zeros(X.shape, dtype=np.int16)
        for c in cuts[1:]:
            idx += X >= c
        return idx
    return np.searchsorted(cuts, X, side="right") - 1


class OrbitEngine:
    def __init__(self, cfg: SystemConfig, rotation: Fraction, extra_denominators: Iterable[int] = ()):
        self.cfg = cfg
        self.k = cfg.k
        dens = [rotation.denominator, cfg.indicator.left.denominator, cfg.indicator.beta.denominator]
        dens += [b.denominator for lv in cfg.f.levels for b in lv.breaks]
        dens += list(extra_denominators)
        self.scale = lcm(*dens)
        self.rotation = rotation
        self.dtype = np.int64 if self.k * self.scale * 4 < _INT64_LIMIT else object
        self.step = self.to_int(rotation % 1)
        self._ind_lo = self.to_int(cfg.indicator.left)
        self._ind_hi = self._ind_lo + self.to_int(cfg.indicator.beta)

        # f as a (level, piece) table over the union of all breakpoints
        cuts = sorted({Fraction(0)} | {b for lv in cfg.f.levels for b in lv.breaks})
        self._f_cuts = np.array([self.to_int(c) for c in cuts], dtype=self.dtype)
        self._f_table = np.array([[lv(c) for c in cuts] for lv in cfg.f.levels], dtype=np.int64)
        self.f_level_free = bool(np.all(self._f_table == self._f_table[0]))

    def to_int(self, x: Fraction) -> int:
        t = Fraction(x) * self.scale
        if t.denominator != 1:
            raise ValueError(f"{x} does not lie on the lattice 1/{self.scale}")
        return int(t)

    def array(self, xs: Iterable[Fraction]) -> np.ndarray:
        return np.array([self.to_int(Fraction(x) % 1) for x in xs], dtype=self.dtype)

    def cut_array(self, points: Sequence[Fraction]) -> np.ndarray:
        """Sorted lattice cuts starting at 0, for :func:`piece_index`."""
        pts = sorted({0} | {self.to_int(Fraction(p) % 1) for p in points})
        return np.array(pts, dtype=self.dtype)

    def to_fraction(self, X: int) -> Fraction:
        return Fraction(int(X), self.scale)

    def indicator(self, X: np.ndarray) -> np.ndarray:
        lo, hi = self._ind_lo, self._ind_hi
        if hi <= self.scale:
            hit = (X >= lo) & (X < hi)
        else:
            hit = (X >= lo) | (X < hi - self.scale)
        return hit.astype(np.int32)

    def f(self, X: np.ndarray, levels: np.ndarray | None) -> np.ndarray:
        idx = piece_index(X, self._f_cuts)
        if levels is None:
            if not self.f_level_free:
                raise ValueError("f depends on the level; levels are required")
            return self._f_table[0][idx]
        return self._f_table[levels, idx]

    def blocks(self, X0, lev0, steps: int, block: int | None = None,
               levels: bool = True) -> Iterator[tuple[int, np.ndarray, np.ndarray | None, np.ndarray]]:
        """Yield ``(i0, X, L, I)`` for times ``i0 .. i0+b-1``.

        ``X`` and ``L`` have shape ``(b, len(X0))`` and hold ``T^i`` of every
        start point; ``I`` holds the indicator at those positions. ``L`` is
        None when ``levels`` is false.
        """
        Xs = np.asarray(X0, dtype=self.dtype)
        lev = np.asarray(lev0, dtype=np.int64) % self.k
        if block is None:
            block = max(1, min(steps, _BLOCK_ELEMENTS // max(1, len(Xs))))
        i0 = 0
        while i0 < steps:
            b = min(block, steps - i0)
            offsets = np.array([(i * self.step) % self.scale for i in range(b)], dtype=self.dtype)
            X = (Xs[None, :] + offsets[:, None]) % self.scale
            I = self.indicator(X)
            L = None
            if levels:
                hits = np.cumsum(I, axis=0, dtype=np.int32)
                L = np.empty(X.shape, dtype=np.int32)
                L[0] = lev
                L[1:] = lev[None, :] + hits[:-1]
                L %= self.k
                total = hits[-1]
            else:
                total = I.sum(axis=0)
            yield i0, X, L, I
            Xs = (Xs + (b * self.step) % self.scale) % self.scale
            lev = (lev + total) % self.k
            i0 += b

    def advance(self, X0, lev0, steps: int) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X0, dtype=self.dtype)
        lev = np.asarray(lev0, dtype=np.int64) % self.k
        for _, _, _, I in self.blocks(X, lev, steps, levels=False):
            lev = (lev + I.sum(axis=0)) % self.k
        return (X + (steps * self.step) % self.scale) % self.scale, lev

    def ergodic_sums(self, X0, lev0, steps: int) -> np.ndarray:
        total = np.zeros(len(X0), dtype=np.int64)
        level_free = self.f_level_free
        for _, X, L, _ in self.blocks(X0, lev0, steps, levels=not level_free):
            total += self.f(X, L).sum(axis=0)
        return total

    def orbit(self, X0, lev0, steps: int) -> tuple[np.ndarray, np.ndarray]:
        """Full ``(steps, len(X0))`` position and level arrays."""
        xs, ls = [], []
        for _, X, L, _ in self.blocks(X0, lev0, steps):
            xs.append(X)
            ls.append(L)
        if not xs:
            n = len(X0)
            return np.zeros((0, n), dtype=self.dtype), np.zeros((0, n), dtype=np.int32)
        return np.vstack(xs), np.vstack(ls)
