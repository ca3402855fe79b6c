import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from skewlab import cli
from skewlab.dynamics import Point, orbit
from skewlab.lemmas import FAIL, LemmaReport
from skewlab.reference import running_example


def run(tmp_path, *argv, sub="out"):
    out = tmp_path / sub
    code = cli.main([*argv, "--out", str(out)])
    return code, out


@pytest.fixture(autouse=True)
def no_env_override(monkeypatch):
    monkeypatch.delenv("SKEWLAB_OUT", raising=False)


def test_simulate_zero_steps_is_header_only(tmp_path):
    code, out = run(tmp_path, "simulate", "--steps", "0")
    assert code == 0
    assert (out / "orbit.csv").read_text() == "i,x,level,m\n"
    report = json.loads((out / "simulate.json").read_text())
    assert report["final_state"] is None
    assert report["manifest"]["subcommand"] == "simulate"


def test_simulate_matches_scalar_orbit(tmp_path):
    code, out = run(tmp_path, "simulate", "--steps", "6", "--x", "1/3", "--level", "2")
    rows = list(csv.DictReader((out / "orbit.csv").open()))
    ref = list(orbit(running_example(), Point(Fraction(1, 3), 2), 6))[1:]
    assert [(Fraction(r["x"]), int(r["level"]), int(r["m"])) for r in rows] == \
        [(s.point.x, s.point.level, s.m) for s in ref]
    assert [int(r["i"]) for r in rows] == list(range(1, 7))


def test_verify_running_example_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify", "--lemma", "all", "--n", "3..10", "--samples", "2000")
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8 * 8
    assert all(json.loads(line)["status"] != "fail" for line in lines)
    report = json.loads((out / "verify.json").read_text())
    assert report["failed"] == [] and report["counts"]["pass"] > 0


def test_verify_exit_status_on_failure(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run_checks", lambda *a, **k: [LemmaReport("quality", 3, "exact", FAIL, {}, {"q": 1})])
    code, out = run(tmp_path, "verify", "--n", "3")
    assert code == 1
    assert json.loads((out / "verify.json").read_text())["failed"] == ["quality@n=3"]


def test_even_k_config_is_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text((cli.builtin_config_text("running-example")).replace('"k": 3', '"k": 4'))
    code, _ = run(tmp_path, "simulate", "--config", str(bad))
    assert code == 2
    err = capsys.readouterr().err
    assert "k must be odd" in err and "line 3" in err


def test_bad_range_and_unknown_check(tmp_path):
    assert run(tmp_path, "verify", "--n", "three")[0] == 2
    assert run(tmp_path, "verify", "--lemma", "nonsense", "--n", "3")[0] == 2
    assert run(tmp_path, "verify", "--n", "40")[0] == 2
    assert run(tmp_path, "simulate", "--config", "no-such-config")[0] == 2


def test_env_overrides_out(tmp_path, monkeypatch):
    target = tmp_path / "from-env"
    monkeypatch.setenv("SKEWLAB_OUT", str(target))
    code, out = run(tmp_path, "surface")
    assert code == 0
    assert (target / "surface.json").exists() and not out.exists()


def test_reports_are_byte_identical(tmp_path):
    argv = [("scan", "--config", "reference"), ("equidist", "--samples", "500", "--seed", "9"),
            ("essential-value", "--at-period"), ("surface", "--max-E", "30"), ("simulate", "--steps", "20")]
    for args in argv:
        assert run(tmp_path, *args, sub="a")[0] == 0
        assert run(tmp_path, *args, sub="b")[0] == 0
    a, b = tmp_path / "a", tmp_path / "b"
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_changes_equidist_report(tmp_path):
    run(tmp_path, "equidist", "--samples", "300", "--seed", "1", sub="a")
    run(tmp_path, "equidist", "--samples", "300", "--seed", "2", sub="b")
    assert (tmp_path / "a" / "equidist.json").read_bytes() != (tmp_path / "b" / "equidist.json").read_bytes()


def test_essential_value_report(tmp_path):
    code, out = run(tmp_path, "essential-value", "--n", "5", "--at-period", "--summary")
    report = json.loads((out / "essential-value.json").read_text())
    assert code == 0 and report["status"] == "witnessed" and report["revalidated"]
    assert report["witness"]["i"] == report["period"] == 57
    assert (out / "essential-value.txt").exists()


def test_wall_clock_is_opt_in(tmp_path):
    run(tmp_path, "surface", sub="a")
    run(tmp_path, "surface", "--wall-clock", sub="b")
    assert "wall_clock_seconds" not in json.loads((tmp_path / "a" / "surface.json").read_text())["manifest"]
    assert "wall_clock_seconds" in json.loads((tmp_path / "b" / "surface.json").read_text())["manifest"]


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "skewlab", "--version"], capture_output=True, text=True)
    assert done.returncode == 0 and "skewlab" in done.stdout
