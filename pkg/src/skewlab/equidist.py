"""Residues of ``[m_i theta] mod k`` along fast-growing integer sequences.

Sequences grow by a ratio schedule: ``m_{i+1} = r_i m_i``. With
``r_i = i + offset`` the ratios tend to infinity (superlacunary) and the
residues equidistribute for almost every theta; a constant ratio is the
lacunary control arm, reported without a uniformity claim.

Theta is drawn as ``b / 2**128`` from a seeded generator so everything
stays exact.
"""

from __future__ import annotations

import csv
import io
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from skewlab.circle import ContractError
from skewlab.rational import ContinuedFraction, DomainError, as_fraction

THETA_BITS = 128


@dataclass(frozen=True)
class SuperlacunarySpec:
    """``m_1 = start`` and ``m_{i+1} = m_i * r_i``.

    ``schedule="linear"`` gives ``r_i = i + offset``; ``"constant"`` gives
    ``r_i = offset``. Generation stops with an error once a term would
    exceed ``bit_budget`` bits.
    """

    start: int = 1
    schedule: str = "linear"
    offset: int = 2
    bit_budget: int = 4096

    def __post_init__(self):
        if self.schedule not in ("linear", "constant"):
            raise ContractError(f"unknown ratio schedule {self.schedule!r}")
        if self.start < 1:
            raise ContractError(f"sequence must start at a positive integer, got {self.start}")

    def ratio(self, i: int) -> int:
        return i + self.offset if self.schedule == "linear" else self.offset

    @property
    def superlacunary(self) -> bool:
        return self.schedule == "linear"

    def check_growth(self, depth: int) -> None:
        """Degenerate specs (a ratio below 2 in the prefix) are rejected."""
        bad = [i for i in range(1, depth) if self.ratio(i) < 2]
        if bad:
            raise ContractError(f"ratio schedule is degenerate: r_{bad[0]} = {self.ratio(bad[0])} < 2")

    def terms(self, depth: int) -> list[int]:
        self.check_growth(depth)
        ms = [self.start]
        for i in range(1, depth):
            m = ms[-1] * self.ratio(i)
            if m.bit_length() > self.bit_budget:
                raise ContractError(f"m_{i + 1} needs {m.bit_length()} bits, over the budget of {self.bit_budget}")
            ms.append(m)
        return ms[:depth]

    def describe(self) -> str:
        if self.superlacunary:
            return f"m1={self.start} ratio=i+{self.offset} budget={self.bit_budget}"
        return f"m1={self.start} ratio={self.offset} budget={self.bit_budget}"


def residue_sequence(theta, ms: Iterable[int], k: int) -> list[int]:
    """``[m theta] mod k`` for each m, by integer division."""
    theta = as_fraction(theta)
    if not 0 <= theta <= 1:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    a, b = theta.numerator, theta.denominator
    return [(m * a // b) % k for m in ms]


def theta_samples(count: int, seed: int) -> list[Fraction]:
    rng = random.Random(seed)
    return [Fraction(rng.getrandbits(THETA_BITS), 1 << THETA_BITS) for _ in range(count)]


@dataclass
class ResidueHistogram:
    k: int
    counts: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.counts:
            self.counts = [0] * self.k

    @property
    def total(self) -> int:
        return sum(self.counts)

    def add(self, residues: Iterable[int]) -> None:
        for r in residues:
            self.counts[r] += 1

    def merge(self, other: "ResidueHistogram") -> "ResidueHistogram":
        return ResidueHistogram(self.k, [a + b for a, b in zip(self.counts, other.counts)])

    def frequencies(self) -> list[float]:
        t = self.total
        return [c / t if t else 0.0 for c in self.counts]

    def max_deviation(self) -> float:
        return max(abs(fr - 1 / self.k) for fr in self.frequencies())


@dataclass
class TrialResult:
    spec: SuperlacunarySpec
    k: int
    samples: int
    depth: int
    seed: int
    histogram: ResidueHistogram
    # per class, the share of thetas where it occurs at least twice after burn-in
    recurrence: list[float]
    transitions: list[list[int]]

    @property
    def window(self) -> range:
        """1-based indices pooled after discarding burn-in."""
        return range(self.depth - self.depth // 2 + 1, self.depth + 1)

    def within(self, tolerance: float) -> bool:
        return self.histogram.max_deviation() <= tolerance

    def to_json(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "superlacunary": self.spec.superlacunary,
            "k": self.k,
            "samples": self.samples,
            "depth": self.depth,
            "seed": self.seed,
            "window": [self.window.start, self.window.stop - 1],
            "counts": self.histogram.counts,
            "total": self.histogram.total,
            "frequencies": [round(f, 12) for f in self.histogram.frequencies()],
            "max_deviation": round(self.histogram.max_deviation(), 12),
            "recurrence_at_least_twice": [round(f, 12) for f in self.recurrence],
            "transitions": self.transitions,
        }


def equidistribution_trial(spec: SuperlacunarySpec, k: int, samples: int = 10_000,
                           depth: int = 12, seed: int = 0) -> TrialResult:
    """Pooled residue frequencies over the last ``depth // 2`` indices."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if depth < 2:
        raise ContractError(f"depth must be at least 2, got {depth}")
    ms = spec.terms(depth)
    late = ms[depth - depth // 2:]
    hist = ResidueHistogram(k)
    twice = [0] * k
    trans = [[0] * k for _ in range(k)]
    for theta in theta_samples(samples, seed):
        rs = residue_sequence(theta, late, k)
        hist.add(rs)
        seen = Counter(rs)
        for j in range(k):
            twice[j] += seen[j] >= 2
        for a, b in zip(rs, rs[1:]):
            trans[a][b] += 1
    recurrence = [t / samples if samples else 0.0 for t in twice]
    return TrialResult(spec, k, samples, depth, seed, hist, recurrence, trans)


def write_histogram_csv(result: TrialResult, out: TextIO | None = None) -> str:
    """CSV ``class,count,frequency`` with the seed and spec echoed as comments."""
    buf = io.StringIO()
    buf.write(f"# seed={result.seed} k={result.k} samples={result.samples} depth={result.depth}\n")
    buf.write(f"# spec: {result.spec.describe()} superlacunary={str(result.spec.superlacunary).lower()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "count", "frequency"])
    for j, (c, fr) in enumerate(zip(result.histogram.counts, result.histogram.frequencies())):
        w.writerow([j, c, f"{fr:.6f}"])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def no_consecutive_even(qs: Sequence[int]) -> bool:
    return not any(a % 2 == 0 and b % 2 == 0 for a, b in zip(qs, qs[1:]))


def residue_one_scan(cf: ContinuedFraction, beta, k: int, N: int, n_range: Iterable[int]) -> list[int]:
    """Levels with ``a_{n+1} > k^2 N``, ``q_n`` odd and ``[q_n beta] = 1 mod k``."""
    beta = as_fraction(beta)
    levels = list(n_range)
    for n in levels:
        cf.check_level(n)
    qs = [q for _, q in cf.convergents]
    if not no_consecutive_even(qs):
        raise AssertionError(f"consecutive even denominators in {qs}")
    out = []
    for n in levels:
        q = cf.q(n)
        if cf.a(n + 1) > k * k * N and q % 2 == 1 and (q * beta.numerator // beta.denominator) % k == 1 % k:
            out.append(n)
    return out
