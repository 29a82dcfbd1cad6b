"""The eleven acceptance criteria, each printing one PASS/FAIL line."""
import os
import subprocess
import sys

import pytest

from ultrakit import acceptance

SEED = 7


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in acceptance.run_all(SEED)}


def report_line(capsys, line):
    with capsys.disabled():
        print(f"\n{line}")


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(results, capsys, number):
    res = results[number]
    report_line(capsys, res.line())
    assert res.passed, (res.metrics, res.violations[:3])
    assert not res.violations
    if res.tails:
        assert res.tails["certified"] == res.tails["checked"]
    if number == 2:
        assert res.elapsed <= 30.0


def _all_report(out_dir):
    env = dict(os.environ, NUMBA_THREADING_LAYER="workqueue")
    proc = subprocess.run([sys.executable, "-m", "ultrakit", "--out-dir", str(out_dir), "--seed", str(SEED), "all"],
                          capture_output=True, env=env, timeout=600)
    return proc, (out_dir / "all.json").read_bytes()


def test_criterion_11_determinism(tmp_path, capsys):
    p1, a = _all_report(tmp_path / "a")
    p2, b = _all_report(tmp_path / "b")
    ok = p1.returncode == 0 and p2.returncode == 0 and a == b
    report_line(capsys, f"{'PASS' if ok else 'FAIL'} criterion 11: determinism")
    assert p1.returncode == 0, p1.stdout.decode() + p1.stderr.decode()
    lines = [[ln for ln in p.stdout.decode().splitlines() if ln.startswith(("PASS", "FAIL"))] for p in (p1, p2)]
    assert lines[0] == lines[1] and len(lines[0]) == 10
    assert a == b
