"""JSON system configs.

A config describes one skew product::

    {
      "name": "reference",
      "k": 3,
      "partial_quotients": [1, 1, 40, ...],
      "beta": "3/10",
      "indicator_left": "0/1",
      "f": [[["0/1", 3], ["1/4", -1]]],
      "odd_mode": true
    }

``f`` lists ``[breakpoint, value]`` pieces per level; a single level is
replicated onto all ``k`` levels. Rationals are written ``"p/q"``.
Validation errors name the field and the line it appears on.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

from skewlab.dynamics import Indicator, LevelFunction, StepFunction, SystemConfig
from skewlab.rational import ContinuedFraction, DomainError, format_fraction, parse_fraction

FIELDS = ("name", "k", "partial_quotients", "beta", "indicator_left", "f", "odd_mode")
REQUIRED = ("k", "partial_quotients", "beta", "f")


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = ""
        if field is not None:
            where = f"field '{field}'" + (f" (line {line})" if line else "") + ": "
        super().__init__(where + message)


def _line_of(text: str, field: str) -> int | None:
    m = re.search(rf'"{re.escape(field)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str, source: str = "<config>") -> SystemConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source} is not valid JSON: {exc.msg}", None, exc.lineno) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{source} must hold a JSON object")

    def fail(field, message):
        raise ConfigError(message, field, _line_of(text, field))

    for key in raw:
        if key not in FIELDS:
            fail(key, f"unknown field; expected one of {', '.join(FIELDS)}")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError("missing required field", key)

    k = raw["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        fail("k", f"k must be a positive integer, got {k!r}")
    if k % 2 == 0:
        fail("k", f"k must be odd, got {k}")

    pq = raw["partial_quotients"]
    if not isinstance(pq, list) or not pq or not all(isinstance(a, int) and not isinstance(a, bool) for a in pq):
        fail("partial_quotients", "expected a nonempty list of integers")
    try:
        cf = ContinuedFraction.of(pq)
    except DomainError as exc:
        fail("partial_quotients", str(exc))

    try:
        left = parse_fraction(str(raw.get("indicator_left", "0/1")))
    except DomainError as exc:
        fail("indicator_left", str(exc))
    try:
        indicator = Indicator(parse_fraction(str(raw["beta"])), left)
    except DomainError as exc:
        fail("beta", str(exc))

    levels_raw = raw["f"]
    if not isinstance(levels_raw, list) or not levels_raw:
        fail("f", "expected a list of levels, each a list of [breakpoint, value] pairs")
    if len(levels_raw) == 1:
        levels_raw = levels_raw * k
    if len(levels_raw) != k:
        fail("f", f"f gives {len(levels_raw)} levels, expected 1 or k={k}")
    levels = []
    for i, pieces in enumerate(levels_raw):
        if not isinstance(pieces, list) or not pieces:
            fail("f", f"level {i} must be a nonempty list of [breakpoint, value] pairs")
        try:
            bs, vs = [], []
            for piece in pieces:
                b, v = piece
                if not isinstance(v, int) or isinstance(v, bool):
                    raise DomainError(f"value {v!r} is not an integer")
                bs.append(parse_fraction(str(b)))
                vs.append(v)
            levels.append(LevelFunction(tuple(bs), tuple(vs)))
        except (DomainError, TypeError, ValueError) as exc:
            fail("f", f"level {i}: {exc}")
    try:
        f = StepFunction(tuple(levels))
    except DomainError as exc:
        fail("f", str(exc))

    odd_mode = raw.get("odd_mode", False)
    if not isinstance(odd_mode, bool):
        fail("odd_mode", "expected true or false")
    try:
        return SystemConfig(k, cf, indicator, f, odd_mode, str(raw.get("name", "")))
    except DomainError as exc:
        fail("odd_mode" if odd_mode else "f", str(exc))


def load_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))


def config_to_dict(cfg: SystemConfig) -> dict:
    levels = [[[format_fraction(b), v] for b, v in zip(lv.breaks, lv.values)] for lv in cfg.f.levels]
    if all(lv == levels[0] for lv in levels):
        levels = levels[:1]
    return {
        "name": cfg.name,
        "k": cfg.k,
        "partial_quotients": cfg.require_alpha().to_list(),
        "beta": format_fraction(cfg.indicator.beta),
        "indicator_left": format_fraction(cfg.indicator.left),
        "f": levels,
        "odd_mode": cfg.odd_mode,
    }


def dump_config(cfg: SystemConfig) -> str:
    """Canonical text: one field per line, f pieces inline."""
    d = config_to_dict(cfg)
    lines = []
    for key in FIELDS:
        lines.append(f"  {json.dumps(key)}: {json.dumps(d[key])}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def config_digest(cfg: SystemConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
