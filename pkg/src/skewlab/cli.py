"""Command-line entry point: ``skewlab <subcommand> [flags]``.

Every subcommand writes a JSON report (sorted keys, exact rationals as
``"p/q"``) embedding a run manifest, plus CSV where tabular output makes
sense. Reports carry no timestamps unless ``--wall-clock`` is given, so two
runs with the same manifest are byte-identical.

Exit status: 0 on success, 1 when a verification check fails, 2 on invalid
input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path

from skewlab import __version__
from skewlab.circle import ContractError, build_A_n, discontinuities
from skewlab.config import ConfigError, config_digest, load_config, parse_config
from skewlab.dynamics import SystemConfig, orbit, variation
from skewlab.equidist import SuperlacunarySpec, residue_one_scan, equidistribution_trial, write_histogram_csv
from skewlab.lemmas import DEFAULT_GRID, DEFAULT_SAMPLES, LEMMAS, good_level_conditions, good_level_scan, run_checks
from skewlab.rational import DomainError, HorizonError, format_fraction, parse_fraction
from skewlab.reference import BUILTIN, builtin_config_text
from skewlab.surface import attained_values, candidate_essential_values, essential_value_search, gluing_connected

DEFAULT_CONFIG = "running-example"
DESK_SCALE = 10**5  # default n ranges stop once k q_n exceeds this


class UsageError(ValueError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    config_name: str
    config_source: str
    config_digest: str
    seed: int
    settings: dict
    outputs: list[str] = field(default_factory=list)
    wall_clock: float | None = None

    def to_json(self) -> dict:
        d = {
            "tool": f"skewlab {__version__}",
            "subcommand": self.subcommand,
            "config": {"name": self.config_name, "source": self.config_source, "sha256": self.config_digest},
            "seed": self.seed,
            "settings": self.settings,
            "outputs": sorted(self.outputs),
        }
        if self.wall_clock is not None:
            d["wall_clock_seconds"] = round(self.wall_clock, 3)
        return d


def parse_range(text: str) -> list[int]:
    """``"a..b"`` (inclusive), ``"a,b,c"`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--n expects a range like 3..10 or a list like 3,5,7, got {text!r}") from None


def resolve_config(name: str) -> tuple[SystemConfig, str]:
    """A path, or the name of a built-in config."""
    if Path(name).is_file():
        return load_config(name), name
    if name in BUILTIN:
        return parse_config(builtin_config_text(name), f"builtin:{name}"), f"builtin:{name}"
    raise ConfigError(f"no config file or built-in named {name!r} (built-ins: {', '.join(sorted(BUILTIN))})")


def default_levels(cfg: SystemConfig) -> list[int]:
    cf = cfg.require_alpha()
    return [n for n in cf.valid_levels() if cfg.k * cf.q(n) <= DESK_SCALE]


def out_dir(args) -> Path:
    path = Path(os.environ.get("SKEWLAB_OUT") or args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class Run:
    """Collects outputs for one invocation and writes them with the manifest."""

    def __init__(self, args, cfg: SystemConfig, source: str, settings: dict):
        self.args = args
        self.dir = out_dir(args)
        self.t0 = time.perf_counter()
        self.files: dict[str, str] = {}
        self.manifest = RunManifest(args.command, cfg.name, source, config_digest(cfg), args.seed, settings)

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def finish(self, report: dict, summary_lines: list[str]) -> None:
        name = f"{self.args.command}.json"
        self.manifest.outputs = [name, *self.files]
        if self.args.summary:
            self.manifest.outputs.append(f"{self.args.command}.txt")
        if self.args.wall_clock:
            self.manifest.wall_clock = time.perf_counter() - self.t0
        report = {"manifest": self.manifest.to_json(), **report}
        (self.dir / name).write_text(dumps(report))
        for fname, text in self.files.items():
            (self.dir / fname).write_text(text)
        if self.args.summary:
            (self.dir / f"{self.args.command}.txt").write_text("\n".join(summary_lines) + "\n")
        for line in summary_lines:
            print(line, file=sys.stderr)


# -- subcommands --------------------------------------------------------------

def cmd_simulate(args, cfg, source) -> int:
    start = cfg.point(parse_fraction(args.x), args.level)
    settings = {"x": format_fraction(start.x), "level": start.level, "steps": args.steps}
    run = Run(args, cfg, source, settings)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "x", "level", "m"])
    final = None
    for i, s in enumerate(orbit(cfg, start, args.steps)):
        if i:
            w.writerow([i, format_fraction(s.point.x), s.point.level, s.m])
            final = {"x": format_fraction(s.point.x), "level": s.point.level, "m": s.m}
    run.add("orbit.csv", buf.getvalue())
    run.finish({"alpha": format_fraction(cfg.rotation), "final_state": final},
               [f"simulated {args.steps} steps from ({settings['x']}, {start.level})"])
    return 0


def cmd_verify(args, cfg, source) -> int:
    lemmas = list(LEMMAS) if args.lemma == "all" else [s.strip() for s in args.lemma.split(",")]
    unknown = [s for s in lemmas if s not in LEMMAS]
    if unknown:
        raise UsageError(f"unknown check {unknown[0]!r}; choose from all, {', '.join(LEMMAS)}")
    levels = parse_range(args.n) if args.n else default_levels(cfg)
    grid = args.grid or DEFAULT_GRID
    settings = {"lemmas": lemmas, "n": levels, "grid": grid, "samples": args.samples, "sigma_grid": args.sigma_grid}
    run = Run(args, cfg, source, settings)
    reports = run_checks(cfg, levels, lemmas, limit=args.samples, grid=grid, sigma_grid=args.sigma_grid)
    rows = [r.to_json() for r in reports]
    for row in rows:
        print(json.dumps(row, sort_keys=True))
    counts = {}
    for r in reports:
        counts[r.status] = counts.get(r.status, 0) + 1
    failed = [f"{r.lemma}@n={r.n}" for r in reports if r.failed]
    run.finish({"reports": rows, "counts": counts, "failed": failed},
               [f"{len(reports)} checks: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))]
               + [f"FAILED {f}" for f in failed])
    return 1 if failed else 0


def cmd_scan(args, cfg, source) -> int:
    cf = cfg.require_alpha()
    levels = parse_range(args.n) if args.n else list(cf.valid_levels())
    N = discontinuities(cfg).N
    run = Run(args, cfg, source, {"n": levels})
    rows = [good_level_conditions(cfg, n) for n in levels]
    for row in rows:
        row["sigma_values"] = sorted(row["sigma_values"])
    good = good_level_scan(cfg, levels)
    residue_one = residue_one_scan(cf, cfg.indicator.beta, cfg.k, N, levels)
    run.finish({"N": N, "conditions": rows, "good_levels": good, "residue_one_levels": residue_one},
               [f"levels meeting all hypotheses: {good}", f"levels with [q_n beta] = 1 mod k: {residue_one}"])
    return 0


def cmd_essential_value(args, cfg, source) -> int:
    cf = cfg.require_alpha()
    if args.n:
        levels = parse_range(args.n)
        if len(levels) != 1:
            raise UsageError("essential-value takes a single level, e.g. --n 6")
        n = levels[0]
    else:
        found = good_level_scan(cfg, default_levels(cfg))
        if not found:
            raise UsageError("no level in the default range meets the hypotheses; pass --n")
        n = found[0]
    period = cfg.k * cf.q(n)
    horizon = args.horizon if args.horizon is not None else period
    grid = args.grid or DEFAULT_GRID
    hist = candidate_essential_values(cfg, n, limit=args.samples, grid=grid, strict=False)
    E = args.E if args.E is not None else (min(hist.most_common(), key=lambda t: (-t[1], t[0]))[0] if hist else 0)
    start = period if args.at_period else 1
    settings = {"n": n, "E": E, "horizon": horizon, "grid": grid, "samples": args.samples, "start": start}
    run = Run(args, cfg, source, settings)
    A = build_A_n(cfg, n)
    witness = None
    if A.measure() > 0:
        witness = essential_value_search(cfg, A, E, horizon, grid, start=start)
    result = {
        "n": n,
        "period": period,
        "candidates": {str(v): c for v, c in sorted(hist.items())},
        "variation": variation(cfg.f),
        "set_measure": format_fraction(A.measure()),
        "status": "witnessed" if witness else "not found up to horizon",
        "witness": witness.to_json() if witness else None,
        "revalidated": bool(witness and witness.revalidate(cfg, A)),
    }
    line = f"E={E} at n={n}: {result['status']}"
    if witness:
        line += f" (i={witness.i}, arc measure {format_fraction(witness.measure)})"
    run.finish(result, [line])
    return 0


def cmd_equidist(args, cfg, source) -> int:
    k = args.k if args.k is not None else cfg.k
    spec = SuperlacunarySpec(args.first_term, args.schedule, args.offset, args.bit_budget)
    settings = {"k": k, "samples": args.samples, "depth": args.depth, "spec": spec.describe()}
    run = Run(args, cfg, source, settings)
    result = equidistribution_trial(spec, k, args.samples, args.depth, args.seed)
    run.add("equidist.csv", write_histogram_csv(result))
    body = result.to_json()
    tol = 0.05
    body["tolerance"] = tol
    body["uniform_within_tolerance"] = result.within(tol) if spec.superlacunary else None
    run.finish(body, [f"k={k} frequencies {[round(f, 4) for f in result.histogram.frequencies()]}"
                      + ("" if spec.superlacunary else " (control arm, no uniformity claim)")])
    return 0


def cmd_surface(args, cfg, source) -> int:
    values = sorted(attained_values(cfg.f))
    run = Run(args, cfg, source, {"max_E": args.max_E})
    g = 0
    for v in values:
        g = gcd(g, v)
    disconnected = [E for E in range(1, args.max_E + 1) if not gluing_connected(cfg.f, E)]
    run.finish({"attained_values": values, "values_gcd": g, "max_E": args.max_E,
                "disconnected_E": disconnected},
               [f"values {values}, gcd {g}; disconnected for E in {disconnected or 'none'}"])
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "essential-value": cmd_essential_value,
    "equidist": cmd_equidist,
    "surface": cmd_surface,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG,
                        help=f"config file or built-in name ({', '.join(sorted(BUILTIN))})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", help="levels: 3..10, 3,5,7 or 6")
    common.add_argument("--grid", type=int, help="sample grid size (a prime near it is used)")
    common.add_argument("--horizon", type=int)
    common.add_argument("--out", default="skewlab-out", help="output directory (SKEWLAB_OUT overrides)")
    common.add_argument("--summary", action="store_true", help="also write a plain-text summary")
    common.add_argument("--wall-clock", action="store_true", help="record elapsed time in the manifest")

    ap = argparse.ArgumentParser(prog="skewlab", description="Exact skew-product laboratory.")
    ap.add_argument("--version", action="version", version=f"skewlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write an exact orbit as CSV")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--x", default="0/1")
    p.add_argument("--level", type=int, default=0)

    p = sub.add_parser("verify", parents=[common], help="run the orbit-regularity checks")
    p.add_argument("--lemma", default="all", help=f"all or a comma list of: {', '.join(LEMMAS)}")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--sigma-grid", type=int, default=1000)

    sub.add_parser("scan", parents=[common], help="scan levels for the large-quotient hypotheses")

    p = sub.add_parser("essential-value", parents=[common], help="search for a return-value witness")
    p.add_argument("--E", type=int, help="value to witness (default: most frequent candidate)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--at-period", action="store_true", help="only look at i = k q_n and beyond")

    p = sub.add_parser("equidist", parents=[common], help="residue equidistribution trial")
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--schedule", choices=["linear", "constant"], default="linear")
    p.add_argument("--offset", type=int, default=2)
    p.add_argument("--first-term", type=int, default=1)
    p.add_argument("--bit-budget", type=int, default=4096)

    p = sub.add_parser("surface", parents=[common], help="gluing-graph connectivity")
    p.add_argument("--max-E", type=int, default=100)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, source = resolve_config(args.config)
        return COMMANDS[args.command](args, cfg, source)
    except ConfigError as exc:
        print(f"skewlab: invalid config: {exc}", file=sys.stderr)
        return 2
    except (UsageError, DomainError, HorizonError, ContractError) as exc:
        print(f"skewlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
