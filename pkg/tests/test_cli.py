import subprocess
import sys
from pathlib import Path

import pytest

from secprot import paper_plant_text
from secprot.cli import main

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def des(tmp_path):
    path = tmp_path / "paper.des"
    path.write_text(paper_plant_text(), encoding="utf-8")
    return str(path)


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("SECPROT_COLOR", "0")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys, des):
    assert run(capsys, "check", des, "--m", "2") == (0, "least k = 1\n", "")
    assert run(capsys, "check", des, "--m", "4")[:2] == (1, "unsolvable\n")
    assert run(capsys, "check", des, "--m", "2", "--k", "0")[:2] == (1, "false\n")
    assert run(capsys, "check", des, "--m", "2", "--k", "1")[:2] == (0, "true\n")
    assert run(capsys, "check", des)[:2] == (0, "least k = 0\n")


def test_check_bad_k(capsys, des):
    assert run(capsys, "check", des, "--k", "7")[0] == 2


def test_bad_flags(capsys, des):
    with pytest.raises(SystemExit) as info:
        main(["check", des, "--m", "zero"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["synth", des, "--m", "0"])
    assert info.value.code == 2


def test_synth_m2(capsys, des):
    code, out, _ = run(capsys, "synth", des, "--m", "2")
    assert code == 0
    assert out == "m: 2\nk: 1\nsolvable: true\nq0: sigma0\nq2: sigma4, sigma6\nq4: sigma10\n"


def test_synth_m1(capsys, des):
    code, out, _ = run(capsys, "synth", des)
    assert code == 0 and out == "m: 1\nk: 0\nsolvable: true\nq0: sigma0\n"


def test_synth_rounds(capsys, des):
    code, out, _ = run(capsys, "synth", des, "--m", "3", "--rounds")
    assert code == 0
    head = [l for l in out.splitlines() if l.startswith("# round")]
    assert head == ["# round 0: k=0", "# round 1: k=1", "# round 2: k=2"]
    assert "#   q1: sigma2, sigma8" in out
    assert "q1: sigma2, sigma8" in out.split("m: 3")[1]


def test_synth_unsolvable(capsys, des):
    code, out, err = run(capsys, "synth", des, "--m", "4")
    assert code == 1
    assert out == "m: 4\nk: none\nsolvable: false\n"
    assert "round 3" in err
    assert "q0 -sigma0'-> q1" in err and err.rstrip().endswith("q5")


def test_synth_then_verify(capsys, des, tmp_path):
    pol = tmp_path / "p2.pol"
    assert run(capsys, "synth", des, "--m", "2", "-o", str(pol))[0] == 0
    assert run(capsys, "verify", des, str(pol), "--m", "2")[:2] == (0, "OK\n")
    code, out, _ = run(capsys, "verify", des, str(pol), "--m", "3")
    assert code == 1 and "witness: q0 -sigma0-> q1" in out


def test_verify_empty_policy(capsys, des, tmp_path):
    pol = tmp_path / "empty.pol"
    pol.write_text("m: 1\nk: none\nsolvable: false\n")
    code, out, _ = run(capsys, "verify", des, str(pol), "--m", "1")
    assert code == 1
    assert "witness: q0 -sigma0-> q1 -sigma2-> q2 -sigma6-> q5" in out


def test_verify_mismatch(capsys, des, tmp_path):
    pol = tmp_path / "bad.pol"
    pol.write_text("m: 1\nk: 0\nsolvable: true\nz9: sigma0\n")
    assert run(capsys, "verify", des, str(pol), "--m", "1")[0] == 2


def test_export(capsys, des, tmp_path):
    pol = tmp_path / "p3.pol"
    run(capsys, "synth", des, "--m", "3", "-o", str(pol))
    dot = tmp_path / "g.dot"
    assert run(capsys, "export", des, "--policy", str(pol), "-o", str(dot))[0] == 0
    assert dot.read_text().count("[lock]") == 6
    code, out, _ = run(capsys, "export", des)
    assert code == 0 and out.startswith("digraph") and "[lock]" not in out


def test_missing_and_unwritable(capsys, des, tmp_path):
    assert run(capsys, "export", str(tmp_path / "nope.des"))[0] == 2
    assert run(capsys, "export", des, "-o", str(tmp_path / "no" / "dir" / "g.dot"))[0] == 2
    assert run(capsys, "check", str(tmp_path / "nope.des"))[0] == 2


def test_malformed_plant(capsys, tmp_path):
    bad = tmp_path / "bad.des"
    bad.write_text("states: a\ninitial a\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "line 2" in err


def test_color(capsys, des, monkeypatch):
    monkeypatch.setenv("SECPROT_COLOR", "1")
    _, out, _ = run(capsys, "check", des, "--m", "2")
    assert out == "\x1b[32mleast k = 1\x1b[0m\n"


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "secprot", *args],
        capture_output=True, cwd=ROOT, env={"SECPROT_COLOR": "0", "PATH": ""},
    )


def test_subprocess_outputs_byte_identical():
    for args in (
        ("synth", "models/paper.des", "--m", "3", "--rounds"),
        ("export", "models/paper.des"),
        ("check", "models/paper.des", "--m", "2"),
    ):
        first, second = _cli(*args), _cli(*args)
        assert first.returncode == second.returncode == 0, first.stderr
        assert first.stdout == second.stdout
