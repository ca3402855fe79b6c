"""Value sets for gluing checks, realised as mean-zero step functions where possible."""

from fractions import Fraction

from skewlab.dynamics import LevelFunction, StepFunction

VALUE_SETS = [
    (3, -1), (1, -1), (2, 4), (5, -3), (2, -2), (6, -4), (3, -3), (7, -5, 1), (9, -3),
    (10, -15), (4, -6, 8), (1, -2), (5, -1, -3), (12, -18, 30), (11, -7), (21, -35),
    (3, 1, -5), (8, -8, 4), (15, -5), (13, -1),
]


def mean_zero_function(values, k=1):
    """Pieces with lengths chosen so the integral vanishes; None if impossible."""
    pos = [v for v in values if v > 0]
    neg = [v for v in values if v < 0]
    if not pos or not neg:
        return None
    # split [0, 1/2) among the positive values and [1/2, 1) among the others,
    # then rescale the halves so the integral vanishes
    P = sum(Fraction(v, len(pos)) for v in pos)
    Q = -sum(Fraction(v, len(neg)) for v in neg)
    lp = Q / (P + Q)
    pieces, x = [], Fraction(0)
    for v in pos:
        pieces.append((x, v))
        x += lp / len(pos)
    for v in neg:
        pieces.append((x, v))
        x += (1 - lp) / len(neg)
    level = LevelFunction(tuple(b for b, _ in pieces), tuple(v for _, v in pieces))
    return StepFunction((level,) * k)


def corpus():
    out = []
    for vs in VALUE_SETS:
        f = mean_zero_function(vs)
        out.append((vs, f if f is not None else set(vs)))
    return out
