"""End-to-end command-line behavior through subprocesses."""

import os
import re
import subprocess
import sys

import pytest


def run_cli(*argv, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "modvar.cli", *argv],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=300,
    )


def test_window_unitary():
    res = run_cli("window", "--framework", "schrodinger")
    assert res.returncode == 0
    match = re.search(r"t_max = ([0-9.]+)", res.stdout)
    assert match and float(match.group(1)) == pytest.approx(10.002041, abs=1e-5)
    assert "criterion:" in res.stdout


def test_window_dissipative_flags():
    res = run_cli("window", "--framework", "cl", "--gamma", "0.001", "--temperature", "2")
    assert res.returncode == 0
    assert float(re.search(r"t_max = ([0-9.]+)", res.stdout).group(1)) == pytest.approx(
        9.605996, abs=1e-5
    )


def test_window_needs_single_framework():
    # default framework is "both", which the solver cannot use
    res = run_cli("window")
    assert res.returncode == 2
    assert "configuration error" in res.stderr


def test_missing_config_file():
    res = run_cli("window", "--framework", "schrodinger", "--config", "no_such_file.cfg")
    assert res.returncode == 2
    assert "configuration error" in res.stderr


def test_bad_flag_value():
    res = run_cli("window", "--framework", "cl", "--gamma", "-0.5")
    assert res.returncode == 2


def test_unknown_figure_name():
    res = run_cli("figure", "fig9")
    # argparse rejects the choice before main() runs
    assert res.returncode == 2


def test_figure_deterministic_bytes(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    r1 = run_cli("figure", "fig2", "--out", str(out1))
    r2 = run_cli("figure", "fig2", "--out", str(out2))
    assert r1.returncode == 0 and r2.returncode == 0
    names = sorted(os.path.basename(p) for p in r1.stdout.split())
    assert names == sorted(os.path.basename(p) for p in r2.stdout.split())
    for name in names:
        b1 = (out1 / name).read_bytes()
        b2 = (out2 / name).read_bytes()
        assert b1 == b2
        assert b"\r" not in b1


def test_figure_header_round_trips_as_config(tmp_path):
    # the '#' header of an emitted CSV, taken verbatim, reloads as a config
    # file that reproduces the same bytes; non-assignment lines are comments
    out1 = tmp_path / "first"
    r1 = run_cli("figure", "fig2", "--out", str(out1), "--alpha", "0.9")
    assert r1.returncode == 0
    path1 = [p for p in r1.stdout.split() if p.endswith(".csv")][0]
    header = []
    with open(path1, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            header.append(line.rstrip("\n"))
    cfg_path = tmp_path / "replay.cfg"
    cfg_path.write_text("\n".join(header) + "\n", encoding="utf-8")
    out2 = tmp_path / "second"
    r2 = run_cli("figure", "fig2", "--config", str(cfg_path), "--out", str(out2))
    assert r2.returncode == 0
    path2 = [p for p in r2.stdout.split() if p.endswith(".csv")][0]
    assert open(path1, "rb").read() == open(path2, "rb").read()


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha=0.0\nkick=0.2\n", encoding="utf-8")
    out = tmp_path / "out"
    res = run_cli("figure", "fig2", "--config", str(cfg), "--kick", "0.1", "--out", str(out))
    assert res.returncode == 0
    path = [p for p in res.stdout.split() if p.endswith(".csv")][0]
    text = open(path, encoding="utf-8").read()
    assert "# kick=0.1" in text
    assert "# alpha=0" in text


def test_verify_exit_code_matches_tally():
    res = run_cli("verify", "--suite", "fast")
    match = re.search(r"(\d+)/(\d+) gates passed", res.stderr)
    assert match, res.stderr
    passed, total = int(match.group(1)), int(match.group(2))
    assert res.returncode == (0 if passed == total else 1)
    assert len(re.findall(r"\[(?:PASS|FAIL)\]", res.stderr)) == total
