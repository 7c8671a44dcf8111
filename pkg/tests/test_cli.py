from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tiltkit.cli import run
from tiltkit.demos import DEMOS

KUMMER = "Zp[p^(1/p^2)] p=3 M=4"


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sharp_of_varpi_flat(capsys):
    code, out, _ = _run(capsys, "sharp", "--ring", KUMMER, "--seq", "3,x^3,x")
    assert code == 0 and out.strip() == "3"


def test_proot_witness(capsys):
    code, out, _ = _run(capsys, "check", "proot", "--ring", "Fp[t^2,t^3] p=5", "--uniformizer", "t^2", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["witness"]["b"] == "t" and rep["refs"]


def test_tilt_add_and_bound(capsys):
    code, out, _ = _run(capsys, "tilt", "add", "--ring", "Zp p=5 M=2", "--seq", "1,1", "--seq", "1,1", "--json")
    s = json.loads(out)
    assert code == 0 and s["seq"] == [[7]] and s["prec"] == 2 and s["cert"] == 2
    code, out, _ = _run(capsys, "tilt", "sharp", "--seq", json.dumps(s), "--json")
    assert code == 0 and json.loads(out)["value"] == [7] and json.loads(out)["prec"] == 2
    code, _, err = _run(capsys, "tilt", "add", "--ring", "Zp p=5 M=2", "--seq", "1,1", "--seq", "1,1", "--bound", "3")
    assert code == 3 and "max achievable: 2" in err


def test_incompatible_sequence_exits_1(capsys):
    code, _, err = _run(capsys, "tilt", "lift", "--ring", "Zp p=5 M=2", "--seq", "2,2")
    assert code == 1 and "Incompatible" in err


def test_tilt_mul_and_frobenius(capsys):
    code, out, _ = _run(capsys, "tilt", "mul", "--ring", KUMMER, "--seq", "3,x^3,x", "--seq", "3,x^3,x")
    assert code == 0 and out.startswith("(9, x^6, x^2)")
    code, out, _ = _run(capsys, "tilt", "frob", "--ring", KUMMER, "--seq", "3,x^3,x")
    assert out.startswith("(27, 3, x^3)")
    code, out, _ = _run(capsys, "tilt", "frobinv", "--ring", "Fp[t^(1/p^2)]/t^2 p=2", "--seq", "t,t^(1/2),t^(1/4)")
    assert code == 0 and out.startswith("(t^(1/2), t^(1/4))")


def test_teich(capsys):
    code, out, _ = _run(capsys, "teich", "--q", "5", "--M", "2", "--a", "2")
    assert code == 0 and out.strip() == "7"
    code, out, _ = _run(capsys, "teich", "--q", "9", "--M", "3", "--json")
    assert code == 0 and json.loads(out)["details"]["checked"] == 9
    code, _, _ = _run(capsys, "teich", "--q", "243", "--M", "2")
    assert code == 3


@pytest.mark.parametrize("argv,expected", [
    (["check", "almost-integral", "--ring", "Fp[t^2,t^3] p=5", "--uniformizer", "t^2", "--elem", "t"], 0),
    (["check", "almost-integral", "--ring", "Fp[t] p=5", "--elem", "t^-1"], 1),
    (["check", "integral", "--ring", "Fp[t^2,t^3] p=5", "--elem", "t"], 0),
    (["check", "integral", "--ring", "Fp[t^(1/3)] p=3", "--elem", "t^(1/9)"], 2),
    (["check", "semiperfect", "--ring", "Fp[t]/t^2 p=2"], 1),
    (["check", "semiperfect", "--ring", "Fq q=7"], 0),
    (["check", "closure", "--ring", "Fp[t^2,t^3] p=5"], 0),
    (["check", "mt1", "--ring", "Fp[t^(1/3)] p=3"], 0),
    (["check", "mt1", "--ring", KUMMER, "--uniformizer", "x"], 0),
    (["check", "mt2", "--ring", KUMMER, "--uniformizer", "x"], 0),
    (["check", "mt2", "--ring", "Zp p=3 M=4", "--uniformizer", "3"], 1),
    (["krull", "--rank", "2"], 0),
    (["krull", "grid", "--bound", "5"], 0),
    (["completion", "--p", "3", "--M", "5"], 0),
])
def test_check_exit_codes(capsys, argv, expected):
    code, _, _ = _run(capsys, *argv)
    assert code == expected


def test_semiperfect_cap_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("TILTKIT_MAX_ENUM", "100")
    code, _, err = _run(capsys, "check", "semiperfect", "--ring", "Fp[t^(1/p^2)]/t^3 p=3")
    assert code == 3 and "TooLarge" in err


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["sharp", "--seq", "1,1"], ["tilt", "lift", "--ring", "Zp p=4 M=2", "--seq", "1"],
    ["check", "proot"], ["check", "integral", "--ring", "Fp[t] p=5"], ["demo", "nope"],
    ["tilt", "add", "--ring", "Zp p=5 M=2", "--seq", "1,1"], ["krull", "--unknown-flag"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demos(capsys, name):
    code, out, _ = _run(capsys, "demo", name, "--json")
    assert code == 0 and json.loads(out)["demo"] == name


def test_minus_one_demo_excludes_minus_one(capsys):
    _, out, _ = _run(capsys, "demo", "minus-one", "--json")
    for row in json.loads(out)["data"]["rows"]:
        assert row["image"] == [0, 1] and row["minus_one"] not in row["image"]
        assert len(row["roots"]) >= 2


def test_monoid_lemma_demo_values(capsys):
    _, out, _ = _run(capsys, "demo", "monoid-lemma")
    assert "sharp = 7 mod 5^2" in out


def test_json_output_is_byte_stable_across_processes():
    argv = [sys.executable, "-m", "tiltkit", "krull", "grid", "--bound", "6", "--json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["verdict"] == "holds"
