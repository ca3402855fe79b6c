"""Mechanical checkers for the orbit-regularity properties of the good sets.

Each checker returns a :class:`LemmaReport`. A failing report always
carries a witness with exact rationals so the failure can be replayed with
the scalar functions in :mod:`skewlab.dynamics`.

Sample points are deterministic: the grid ``t/G`` intersected with the set
under test, times every level, thinned evenly to the requested count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from skewlab.circle import (
    CircleIntervalSet,
    build_A_n,
    discontinuities,
    good_set_lower_bound,
    near_invariance_bound,
)
from skewlab.dynamics import Point, SystemConfig, base_step, periodic_step, variation
from skewlab.engine import OrbitEngine, piece_index
from skewlab.rational import (
    convergent_above,
    dist_nearest_int,
    format_fraction,
    frac_part,
    qn_alpha_distance,
    quality_bound_check,
)

DEFAULT_GRID = 10007
DEFAULT_SAMPLES = 10_000

PASS, FAIL, DEGENERATE, PRECONDITION = "pass", "fail", "degenerate", "precondition"

_INT64_SAFE = 2**62


def _json_value(v):
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, Point):
        return {"x": format_fraction(v.x), "level": v.level}
    if isinstance(v, dict):
        return {str(a): _json_value(b) for a, b in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [_json_value(x) for x in items]
    return v


@dataclass
class LemmaReport:
    lemma: str
    n: int | None
    sample: str
    status: str
    details: dict = field(default_factory=dict)
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.status in (PASS, DEGENERATE)

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "n": self.n,
            "sample": self.sample,
            "status": self.status,
            "details": _json_value(self.details),
            "witness": _json_value(self.witness),
        }


# -- sampling -----------------------------------------------------------------

def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    r = 3
    while r * r <= m:
        if m % r == 0:
            return False
        r += 2
    return True


def grid_size(at_least: int, avoid: Iterable[int] = ()) -> int:
    """Smallest prime ``>= at_least`` coprime to every number in ``avoid``."""
    avoid = [a for a in avoid if a > 1]
    g = max(2, at_least)
    while not (_is_prime(g) and all(gcd(g, a) == 1 for a in avoid)):
        g += 1
    return g


@dataclass(frozen=True)
class Samples:
    xs: tuple[Fraction, ...]
    levels: tuple[int, ...]
    grid: int
    population: int

    def __len__(self) -> int:
        return len(self.xs)

    def points(self) -> list[Point]:
        return [Point(x, lv) for x, lv in zip(self.xs, self.levels)]

    def describe(self) -> str:
        return f"{len(self)} of {self.population} grid points t/{self.grid} x levels"


def sample_set(A: CircleIntervalSet, limit: int = DEFAULT_SAMPLES, grid: int = DEFAULT_GRID,
               avoid: Iterable[int] = (), max_grid: int = 20_000_000) -> Samples:
    """Deterministic grid sample of ``A`` (all levels), at most ``limit`` points.

    The grid is enlarged when ``grid`` alone would not yield ``limit`` points.
    """
    mu = A.measure()
    avoid = list(avoid)
    if mu == 0 or limit <= 0:
        return Samples((), (), grid_size(grid, avoid), 0)
    wanted = ceil(Fraction(limit) * 5 / 4 / mu)
    G = grid_size(min(max(grid, wanted), max_grid), avoid)
    scale = lcm(A.denom, G)
    dtype = np.int64 if scale < 2**62 else object
    t = np.arange(G, dtype=np.int64).astype(dtype)
    inside = np.flatnonzero(A.member_mask(t * (scale // G), scale))
    population = len(inside) * A.k
    if population == 0:
        return Samples((), (), G, 0)
    count = min(limit, population)
    picks = (np.arange(count, dtype=np.int64) * population) // count
    xs = tuple(Fraction(int(inside[i // A.k]), G) for i in picks)
    levels = tuple(int(i % A.k) for i in picks)
    return Samples(xs, levels, G, population)


def samples_for(cfg: SystemConfig, n: int, limit: int = DEFAULT_SAMPLES,
                grid: int = DEFAULT_GRID) -> tuple[CircleIntervalSet, Samples]:
    A = build_A_n(cfg, n)
    cf = cfg.require_alpha()
    return A, sample_set(A, limit, grid, avoid=[cf.q(m) for m in range(1, n + 2) if m <= len(cf)])


def _engine(cfg: SystemConfig, rotation: Fraction, samples: Samples, *extra: int) -> OrbitEngine:
    return OrbitEngine(cfg, rotation, [samples.grid, *extra])


def _start(engine: OrbitEngine, samples: Samples):
    return engine.array(samples.xs), np.array(samples.levels, dtype=np.int64)


# -- n-good -------------------------------------------------------------------

def n_good_failure(cfg: SystemConfig, n: int, p: Point) -> int | None:
    """First time ``i < k q_n`` where T and the approximant disagree on f or I."""
    cf = cfg.require_alpha()
    cf.check_level(n)
    t, r = p, p
    for i in range(cfg.k * cf.q(n)):
        if cfg.indicator(t.x) != cfg.indicator(r.x) or cfg.f(t) != cfg.f(r):
            return i
        t = base_step(cfg, t)
        r = periodic_step(cfg, n, r)
    return None


def is_n_good(cfg: SystemConfig, n: int, p: Point) -> bool:
    """Double-orbit simulation of the n-good property."""
    return n_good_failure(cfg, n, p) is None


def n_good_mask(cfg: SystemConfig, n: int, samples: Samples) -> np.ndarray:
    """First disagreement time per sample, ``-1`` where the sample is n-good.

    Both orbits are first compared by which cell of the discontinuity
    partition they visit; equal cells force equal values of f and I (and
    hence equal levels). Samples where the cells ever differ are replayed
    exactly with f and I, since crossing a jump-free breakpoint is harmless.
    """
    cf = cfg.require_alpha()
    cf.check_level(n)
    pn, qn = cf.convergent(n)
    steps = cfg.k * qn
    first_bad = np.full(len(samples), -1, dtype=np.int64)
    if not len(samples):
        return first_bad
    eng_t = _engine(cfg, cf.value, samples)
    eng_q = _engine(cfg, Fraction(pn, qn), samples)
    D = discontinuities(cfg).points
    cuts_t, cuts_q = eng_t.cut_array(D), eng_q.cut_array(D)
    X_t, lev = _start(eng_t, samples)
    X_q, _ = _start(eng_q, samples)
    block = max(1, min(steps, 2_000_000 // len(samples)))
    suspect = np.zeros(len(samples), dtype=bool)
    for (_, Xa, _, _), (_, Xb, _, _) in zip(eng_t.blocks(X_t, lev, steps, block, levels=False),
                                            eng_q.blocks(X_q, lev, steps, block, levels=False)):
        suspect |= np.any(piece_index(Xa, cuts_t) != piece_index(Xb, cuts_q), axis=0)
    idx = np.flatnonzero(suspect)
    if len(idx):
        X_t, X_q, lev = X_t[idx], X_q[idx], lev[idx]
        block = max(1, min(steps, 2_000_000 // len(idx)))
        sub_bad = np.full(len(idx), -1, dtype=np.int64)
        for (i0, Xa, La, Ia), (_, Xb, Lb, Ib) in zip(eng_t.blocks(X_t, lev, steps, block),
                                                      eng_q.blocks(X_q, lev, steps, block)):
            bad = (Ia != Ib) | (eng_t.f(Xa, La) != eng_q.f(Xb, Lb))
            hit = bad.any(axis=0) & (sub_bad < 0)
            if hit.any():
                sub_bad[hit] = i0 + bad[:, hit].argmax(axis=0)
        first_bad[idx] = sub_bad
    return first_bad


# -- sigma ----------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaValue:
    value: int
    M: int


def _sigma_count(q: int, beta: Fraction, u: Fraction) -> int:
    # grid {u + j/q} meets [0, beta) in ceil(q beta - frac(u q)) points
    t = frac_part(u * q)
    return max(0, ceil(q * beta - t))


def sigma_n(cfg: SystemConfig, n: int, x) -> SigmaValue:
    """``sum_{i<q_n} I(x + i/q_n)`` together with ``M = [q_n beta]``."""
    cf = cfg.require_alpha()
    cf.check_level(n)
    q = cf.q(n)
    beta = cfg.indicator.beta
    u = frac_part(Fraction(x) - cfg.indicator.left)
    return SigmaValue(_sigma_count(q, beta, u), floor(q * beta))


def sigma_by_enumeration(cfg: SystemConfig, n: int, x) -> int:
    q = cfg.require_alpha().q(n)
    return sum(cfg.indicator(Fraction(x) + Fraction(i, q)) for i in range(q))


def attained_sigma_values(cfg: SystemConfig, n: int) -> tuple[set[int], bool]:
    """Values of sigma_n over the whole circle and whether ``q_n beta`` is an integer.

    sigma_n depends only on ``frac((x - left) q_n)``, a step function with at
    most one jump, so evaluating it on both sides of every jump is exhaustive.
    """
    q = cfg.require_alpha().q(n)
    beta = cfg.indicator.beta
    jump = frac_part(q * beta)
    probes = {Fraction(0), jump, (jump + 1) / 2, jump / 2}
    left = cfg.indicator.left
    values = {sigma_n(cfg, n, left + t / q).value for t in probes}
    return values, jump == 0


# -- spread out ---------------------------------------------------------------------

def _one_per_cell_sweep(positions: Sequence[int], scale: int, q: int) -> bool:
    """Whether some translate of the 1/q grid puts exactly one point per cell.

    Cell of ``y`` for offset ``c`` (in units of 1/q) is ``floor(y q) `` when
    ``frac(y q) >= c`` and one less otherwise; sweeping ``c`` over the
    fractional parts visits every distinct assignment.
    """
    if len(positions) != q:
        return False
    cells = [(y * q) // scale for y in positions]
    fracs = [(y * q) % scale for y in positions]
    count = [0] * q
    for c in cells:
        count[c % q] += 1
    bad = sum(1 for c in count if c != 1)
    if bad == 0:
        return True
    order = sorted(range(q), key=fracs.__getitem__)
    j = 0
    while j < q:
        phi = fracs[order[j]]
        while j < q and fracs[order[j]] == phi:
            src = cells[order[j]] % q
            dst = (src - 1) % q
            for cell, delta in ((src, -1), (dst, 1)):
                before = count[cell] != 1
                count[cell] += delta
                bad += (count[cell] != 1) - before
            j += 1
        if bad == 0:
            return True
    return False


def _anchored_cells(rel: np.ndarray, scale: int, q: int, closed_left: bool) -> np.ndarray:
    """Cell of each relative position in the grid anchored at 0."""
    if scale * q < _INT64_SAFE and rel.dtype != object:
        if closed_left:
            return rel * q // scale
        return (-((-rel * q) // scale) - 1) % q
    if closed_left:
        bounds = np.array([-(-j * scale // q) for j in range(q + 1)], dtype=rel.dtype)
        return np.searchsorted(bounds, rel.ravel(), side="right").reshape(rel.shape) - 1
    bounds = np.array([j * scale // q for j in range(q + 1)], dtype=rel.dtype)
    return (np.searchsorted(bounds, rel.ravel(), side="left").reshape(rel.shape) - 1) % q


def _is_permutation(cells: np.ndarray, q: int) -> np.ndarray:
    """``cells`` has shape (rows, q); True for rows hitting each of 0..q-1 once."""
    rows = cells.shape[0]
    flat = (np.arange(rows, dtype=np.int64)[:, None] * q + cells.astype(np.int64)).ravel()
    counts = np.bincount(flat, minlength=rows * q).reshape(rows, q)
    return np.all(counts == 1, axis=1)


def spread_out_mask(cfg: SystemConfig, n: int, samples: Samples) -> np.ndarray:
    """Per-sample n-spread-out verdict.

    On each level the grid is anchored at the earliest orbit point there.
    The end convention matching the side of the convergent is tried first,
    then the other one; only if both fail does the exhaustive offset sweep
    run for that level.
    """
    cf = cfg.require_alpha()
    cf.check_level(n)
    q = cf.q(n)
    k = cfg.k
    steps = k * q
    first_convention = not convergent_above(cf, n)
    eng = _engine(cfg, cf.value, samples)
    scale = eng.scale
    verdict = np.zeros(len(samples), dtype=bool)
    X0, lev0 = _start(eng, samples)
    chunk = max(1, 2_000_000 // max(1, steps))
    for s0 in range(0, len(samples), chunk):
        X, L = eng.orbit(X0[s0:s0 + chunk], lev0[s0:s0 + chunk], steps)
        X, L = np.ascontiguousarray(X.T), L.T.astype(np.int8 if k < 128 else np.int64)
        cols = X.shape[0]
        counts_ok = np.all(np.stack([(L == lv).sum(axis=1) for lv in range(k)], axis=1) == q, axis=1)
        if not counts_ok.any():
            continue
        X, L = X[counts_ok], L[counts_ok]
        order = np.argsort(L, axis=1, kind="stable")
        # rows: (sample, level) pairs, each holding that level's q orbit points in time order
        Xs = np.take_along_axis(X, order, axis=1).reshape(-1, q)
        rel = Xs - Xs[:, :1]
        rel += scale * (rel < 0)
        ok = _is_permutation(_anchored_cells(rel, scale, q, first_convention), q)
        for r in np.flatnonzero(~ok):
            row = rel[r:r + 1]
            if _is_permutation(_anchored_cells(row, scale, q, not first_convention), q)[0]:
                ok[r] = True
            else:
                ok[r] = _one_per_cell_sweep([int(y) for y in Xs[r]], scale, q)
        good = np.zeros(cols, dtype=bool)
        good[np.flatnonzero(counts_ok)] = ok.reshape(-1, k).all(axis=1)
        verdict[s0:s0 + cols] = good
    return verdict


def is_n_spread_out(cfg: SystemConfig, n: int, p: Point) -> bool:
    s = Samples((p.x,), (p.level,), p.x.denominator, 1)
    return bool(spread_out_mask(cfg, n, s)[0])


# -- reports ----------------------------------------------------------------------

def _witness(samples: Samples, index: int, **extra) -> dict:
    return {"point": Point(samples.xs[index], samples.levels[index]), **extra}


def check_quality(cfg: SystemConfig, n: int) -> LemmaReport:
    cf = cfg.require_alpha()
    q = cf.q(n)
    lhs = q * qn_alpha_distance(cf, n)
    rhs = Fraction(1, cf.a(n + 1))
    ok = quality_bound_check(cf, n)
    return LemmaReport("quality", n, "exact", PASS if ok else FAIL,
                       {"q_n": q, "lhs": lhs, "rhs": rhs},
                       None if ok else {"q_n": q, "lhs": lhs, "rhs": rhs})


def check_spread_bound(cfg: SystemConfig, n: int) -> LemmaReport:
    """``a_{n+1} >= k`` implies ``k ||q_n alpha|| < 1/q_n``."""
    cf = cfg.require_alpha()
    q = cf.q(n)
    lhs = cfg.k * qn_alpha_distance(cf, n)
    if cf.a(n + 1) < cfg.k:
        return LemmaReport("spread-bound", n, "exact", PRECONDITION, {"a_next": cf.a(n + 1)})
    ok = lhs < Fraction(1, q)
    return LemmaReport("spread-bound", n, "exact", PASS if ok else FAIL,
                       {"lhs": lhs, "rhs": Fraction(1, q)}, None if ok else {"lhs": lhs, "q_n": q})


def check_good_set(cfg: SystemConfig, n: int, A: CircleIntervalSet, samples: Samples) -> LemmaReport:
    """Measure bound for ``A_n`` and n-goodness of every sample."""
    mu = A.measure()
    bound = good_set_lower_bound(cfg, n)
    details = {"measure": mu, "lower_bound": bound, "samples": len(samples)}
    if mu < bound:
        return LemmaReport("good-set", n, samples.describe(), FAIL, details, {"measure": mu, "bound": bound})
    if not len(samples):
        return LemmaReport("good-set", n, samples.describe(), DEGENERATE, details)
    first_bad = n_good_mask(cfg, n, samples)
    bad = np.flatnonzero(first_bad >= 0)
    details["not_good"] = len(bad)
    if len(bad):
        i = int(bad[0])
        return LemmaReport("good-set", n, samples.describe(), FAIL, details,
                           _witness(samples, i, time=int(first_bad[i])))
    return LemmaReport("good-set", n, samples.describe(), PASS, details)


def near_rigidity_check(cfg: SystemConfig, n: int, samples: Samples) -> LemmaReport:
    """Level kept and displacement ``||k q_n alpha|| <= k||q_n alpha||`` after ``k q_n`` steps."""
    cf = cfg.require_alpha()
    cf.check_level(n)
    q = cf.q(n)
    exact = dist_nearest_int(cfg.k * q * cf.value)
    bound = cfg.k * qn_alpha_distance(cf, n)
    details = {"displacement": exact, "bound": bound, "samples": len(samples)}
    if exact > bound:
        return LemmaReport("near-rigidity", n, samples.describe(), FAIL, details, {"displacement": exact})
    if not len(samples):
        return LemmaReport("near-rigidity", n, samples.describe(), DEGENERATE, details)
    eng = _engine(cfg, cf.value, samples)
    X0, lev0 = _start(eng, samples)
    X1, lev1 = eng.advance(X0, lev0, cfg.k * q)
    d = (X1 - X0) % eng.scale
    dist = np.minimum(d, eng.scale - d)
    want = eng.to_int(exact)
    bad = np.flatnonzero((lev1 != lev0) | (dist != want))
    details["violations"] = len(bad)
    if len(bad):
        i = int(bad[0])
        return LemmaReport("near-rigidity", n, samples.describe(), FAIL, details,
                           _witness(samples, i, end=Point(eng.to_fraction(X1[i]), int(lev1[i]))))
    return LemmaReport("near-rigidity", n, samples.describe(), PASS, details)


def check_sigma_constancy(cfg: SystemConfig, n: int, samples: Samples) -> LemmaReport:
    """On the good set sigma_n counts real indicator hits and repeats every q_n steps."""
    cf = cfg.require_alpha()
    q = cf.q(n)
    details = {"samples": len(samples)}
    if not len(samples):
        return LemmaReport("sigma-constancy", n, samples.describe(), DEGENERATE, details)
    eng = _engine(cfg, cf.value, samples)
    X0, lev0 = _start(eng, samples)
    hits = np.zeros((cfg.k, len(samples)), dtype=np.int64)
    for i0, _, _, I in eng.blocks(X0, lev0, cfg.k * q, levels=False):
        segment = np.arange(i0, i0 + I.shape[0]) // q
        starts = np.flatnonzero(np.r_[True, segment[1:] != segment[:-1]])
        hits[segment[starts]] += np.add.reduceat(I, starts, axis=0)
    sig = np.array([_sigma_count(q, cfg.indicator.beta, frac_part(x - cfg.indicator.left))
                    for x in samples.xs], dtype=np.int64)
    bad = np.flatnonzero(np.any(hits != sig[None, :], axis=0))
    details["violations"] = len(bad)
    if len(bad):
        i = int(bad[0])
        return LemmaReport("sigma-constancy", n, samples.describe(), FAIL, details,
                           _witness(samples, i, sigma=int(sig[i]), segment_hits=[int(h) for h in hits[:, i]]))
    return LemmaReport("sigma-constancy", n, samples.describe(), PASS, details)


def check_sigma_values(cfg: SystemConfig, n: int, grid: int = 1000) -> LemmaReport:
    """sigma_n takes only the values M, M+1 (only M when ``q_n beta`` is an integer)."""
    cf = cfg.require_alpha()
    q = cf.q(n)
    M = floor(q * cfg.indicator.beta)
    edge = (q * cfg.indicator.beta).denominator == 1
    allowed = {M} if edge else {M, M + 1}
    seen: set[int] = set()
    for t in range(grid):
        x = Fraction(t, grid)
        v = sigma_n(cfg, n, x).value
        seen.add(v)
        if v not in allowed:
            return LemmaReport("sigma-values", n, f"x-grid t/{grid}", FAIL,
                               {"M": M, "allowed": allowed}, {"x": x, "sigma": v})
    return LemmaReport("sigma-values", n, f"x-grid t/{grid}", PASS,
                       {"M": M, "edge": edge, "seen": seen, "allowed": allowed})


def check_near_invariance(cfg: SystemConfig, n: int, A: CircleIntervalSet | None = None) -> LemmaReport:
    A = build_A_n(cfg, n) if A is None else A
    image = A.rotate(cfg.rotation)
    sym = (A ^ image).measure()
    bound = near_invariance_bound(cfg, n)
    ok = sym <= bound
    return LemmaReport("near-invariance", n, "exact", PASS if ok else FAIL,
                       {"symmetric_difference": sym, "bound": bound},
                       None if ok else {"symmetric_difference": sym, "bound": bound})


def quasi_rigidity_check(cfg: SystemConfig, n: int, epsilon, samples: Samples | None = None,
                         A: CircleIntervalSet | None = None) -> LemmaReport:
    if A is None or samples is None:
        A, samples = samples_for(cfg, n)
    epsilon = Fraction(epsilon)
    rigid = near_rigidity_check(cfg, n, samples)
    mu = A.measure()
    ok = rigid.status == PASS and mu >= epsilon
    return LemmaReport("quasi-rigidity", n, samples.describe(), PASS if ok else FAIL,
                       {"measure": mu, "epsilon": epsilon, "near_rigidity": rigid.status},
                       None if ok else {"measure": mu, "epsilon": epsilon, "near_rigidity": rigid.status})


def koksma_check(cfg: SystemConfig, n: int, p: Point) -> LemmaReport:
    """``|S_{k q_n}(p)| <= var(f)`` at an n-spread-out point."""
    s = Samples((p.x,), (p.level,), p.x.denominator, 1)
    return _spread_koksma(cfg, n, s, require_spread=True, lemma="koksma")


def _spread_koksma(cfg: SystemConfig, n: int, samples: Samples, require_spread: bool,
                   lemma: str = "spread-koksma") -> LemmaReport:
    cf = cfg.require_alpha()
    q = cf.q(n)
    steps = cfg.k * q
    var = variation(cfg.f)
    parity = cfg.f.all_odd and steps % 2 == 1
    details = {"samples": len(samples), "variation": var, "odd_parity_expected": parity}
    if not len(samples):
        return LemmaReport(lemma, n, samples.describe(), DEGENERATE, details)
    spread = spread_out_mask(cfg, n, samples)
    details["spread_out"] = int(spread.sum())
    if require_spread and not spread.all():
        i = int(np.flatnonzero(~spread)[0])
        return LemmaReport(lemma, n, samples.describe(), PRECONDITION, details,
                           _witness(samples, i, reason="not n-spread-out"))
    eng = _engine(cfg, cf.value, samples)
    X0, lev0 = _start(eng, samples)
    S = eng.ergodic_sums(X0, lev0, steps)
    bad = np.abs(S) > var
    if parity:
        bad |= (S % 2 == 0) | (np.abs(S) < 1)
    bad &= spread
    details["sum_range"] = [int(S.min()), int(S.max())]
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        return LemmaReport(lemma, n, samples.describe(), FAIL, details, _witness(samples, i, sum=int(S[i])))
    return LemmaReport(lemma, n, samples.describe(), PASS, details)


def check_spread_koksma(cfg: SystemConfig, n: int, samples: Samples) -> LemmaReport:
    """Spread-out criterion then the Koksma bound (and parity) on the good-set samples.

    Only samples meeting the criterion's hypotheses (``a_{n+1} >= k`` and
    sigma_n coprime to k) are expected to be spread out.
    """
    cf = cfg.require_alpha()
    q = cf.q(n)
    if cf.a(n + 1) < cfg.k:
        return LemmaReport("spread-koksma", n, samples.describe(), PRECONDITION, {"a_next": cf.a(n + 1)})
    keep = [i for i, x in enumerate(samples.xs)
            if gcd(sigma_n(cfg, n, x).value, cfg.k) == 1]
    sub = Samples(tuple(samples.xs[i] for i in keep), tuple(samples.levels[i] for i in keep),
                  samples.grid, samples.population)
    if not len(sub):
        return LemmaReport("spread-koksma", n, samples.describe(), PRECONDITION,
                           {"reason": "no sample with sigma_n coprime to k"})
    report = _spread_koksma(cfg, n, sub, require_spread=False)
    if report.status == PASS and report.details["spread_out"] != len(sub):
        spread = spread_out_mask(cfg, n, sub)
        i = int(np.flatnonzero(~spread)[0])
        report.status = FAIL
        report.witness = _witness(sub, i, reason="criterion hypotheses hold but not n-spread-out")
    return report


def good_level_conditions(cfg: SystemConfig, n: int) -> dict:
    cf = cfg.require_alpha()
    cf.check_level(n)
    N = discontinuities(cfg).N
    q = cf.q(n)
    values, edge = attained_sigma_values(cfg, n)
    return {
        "n": n,
        "q_n": q,
        "a_next": cf.a(n + 1),
        "large_quotient": cf.a(n + 1) > cfg.k ** 2 * N,
        "q_odd": q % 2 == 1,
        "sigma_values": values,
        "sigma_coprime": all(gcd(v, cfg.k) == 1 for v in values),
        "edge_case": edge,
    }


def good_level_scan(cfg: SystemConfig, n_range: Iterable[int]) -> list[int]:
    """Levels where ``a_{n+1} > k^2 N``, ``q_n`` is odd and every sigma_n value is coprime to k."""
    out = []
    for n in n_range:
        c = good_level_conditions(cfg, n)
        if c["large_quotient"] and c["q_odd"] and c["sigma_coprime"]:
            out.append(n)
    return out


def koksma_inequality_holds(level_f, points: Sequence[Fraction]) -> bool:
    """Koksma for one level: points one per cell of the 1/len(points) grid."""
    n = len(points)
    total = sum(level_f(x) for x in points)
    return abs(total - n * level_f.integral()) <= level_f.variation()


LEMMAS = ("quality", "spread-bound", "good-set", "near-rigidity", "sigma-constancy",
          "sigma-values", "near-invariance", "spread-koksma")


def run_checks(cfg: SystemConfig, n_values: Iterable[int], lemmas: Sequence[str] = LEMMAS,
               limit: int = DEFAULT_SAMPLES, grid: int = DEFAULT_GRID,
               sigma_grid: int = 1000) -> list[LemmaReport]:
    """Run the requested checkers for each n, in n order then lemma order."""
    unknown = set(lemmas) - set(LEMMAS)
    if unknown:
        raise ValueError(f"unknown lemma checks {sorted(unknown)}; choose from {list(LEMMAS)}")
    reports = []
    for n in n_values:
        cfg.require_alpha().check_level(n)
        needs_set = {"good-set", "near-rigidity", "sigma-constancy", "near-invariance", "spread-koksma"}
        A = samples = None
        if needs_set & set(lemmas):
            A, samples = samples_for(cfg, n, limit, grid)
        for lemma in lemmas:
            if lemma == "quality":
                reports.append(check_quality(cfg, n))
            elif lemma == "spread-bound":
                reports.append(check_spread_bound(cfg, n))
            elif lemma == "good-set":
                reports.append(check_good_set(cfg, n, A, samples))
            elif lemma == "near-rigidity":
                reports.append(near_rigidity_check(cfg, n, samples))
            elif lemma == "sigma-constancy":
                reports.append(check_sigma_constancy(cfg, n, samples))
            elif lemma == "sigma-values":
                reports.append(check_sigma_values(cfg, n, sigma_grid))
            elif lemma == "near-invariance":
                reports.append(check_near_invariance(cfg, n, A))
            elif lemma == "spread-koksma":
                if good_level_scan(cfg, [n]):
                    reports.append(check_spread_koksma(cfg, n, samples))
                else:
                    reports.append(LemmaReport("spread-koksma", n, samples.describe(), PRECONDITION,
                                               {"reason": "scan hypotheses fail at this n"}))
    return reports
