from __future__ import annotations

import json
import subprocess
import sys

import pytest

from nonorientable_mcshane.cli import (
    RunConfig,
    format_complex,
    jsonable,
    main,
    parse_complex,
)
from nonorientable_mcshane.errors import DomainError


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize(
    "text,value",
    [("1+0.3i", 1 + 0.3j), ("2-0.1i", 2 - 0.1j), ("0.5i", 0.5j), ("-i", -1j), ("3", 3 + 0j),
     ("1e-3+2j", 1e-3 + 2j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+2k", "i+1"])
def test_parse_complex_rejects(text):
    with pytest.raises(DomainError):
        parse_complex(text)


def test_format_complex_round_trip():
    z = 1.5 - 0.25j
    assert parse_complex(format_complex(z)) == z


def test_jsonable():
    out = jsonable({"a": 1 + 2j, "b": float("inf"), "c": (1, 2.5)})
    assert out == {"a": {"re": 1.0, "im": 2.0}, "b": None, "c": [1, 2.5]}


def test_runconfig_validation():
    with pytest.raises(DomainError):
        RunConfig(tolerance=0.0)
    with pytest.raises(DomainError):
        RunConfig(max_terms=0)


def test_identity_punctured_klein(capsys):
    code, out = run(capsys, "identity", "punctured-klein", "--y0", "1", "--y1", "2")
    rec = json.loads(out)
    assert code == 0
    assert rec["residual"] < 1e-10
    assert rec["converged"] is True


def test_identity_z_check(capsys):
    code, out = run(capsys, "identity", "punctured-klein", "--y0", "1", "--y1", "1", "--z-check")
    rec = json.loads(out)
    assert code == 0
    assert rec["z_check"]["Z"] == 3.0 and rec["z_check"]["hyperbolic"] is True


def test_identity_complex(capsys):
    code, out = run(capsys, "identity", "complex", "--y0", "1+0.3i", "--y1", "2-0.1i")
    rec = json.loads(out)
    assert code == 0
    assert set(rec["partial_sum"]) == {"re", "im"}


def test_identity_other_targets(capsys):
    assert run(capsys, "identity", "bordered-klein", "--L", "1", "--y0", "1", "--y1", "2")[0] == 0
    assert run(capsys, "identity", "punctured-torus")[0] == 0


def test_invalid_input_exit_1(capsys):
    code, out = run(capsys, "identity", "punctured-klein", "--y0", "-1", "--y1", "2")
    assert code == 1
    assert json.loads(out)["error"] == "InvalidSeed"
    code, out = run(capsys, "identity", "complex", "--y0", "1i", "--y1", "1i")
    assert code == 1
    assert json.loads(out)["error"] == "LoxodromicViolation"
    code, out = run(capsys, "identity", "punctured-klein", "--y0", "1")
    assert code == 1
    assert json.loads(out)["error"] == "UsageError"


def test_non_convergence_exit_2(capsys):
    code, out = run(
        capsys, "identity", "punctured-klein", "--y0", "8", "--y1", "8", "--max-terms", "5"
    )
    assert code == 2
    assert json.loads(out)["converged"] is False


def test_csv_output(capsys):
    code, out = run(capsys, "fibonacci", "--count", "10", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "i,F_2i,length,word_trace"
    assert [int(l.split(",")[1]) for l in lines[1:]] == [1, 2, 5, 13, 34, 89, 233, 610, 1597, 4181]
    code, out = run(capsys, "identity", "punctured-klein", "--y0", "1", "--y1", "2", "--format", "csv")
    assert out.splitlines()[0].startswith("kind,seed,Z")


def test_spectrum(capsys):
    code, out = run(capsys, "spectrum", "--y0", "1", "--y1", "2", "--count", "2")
    rec = json.loads(out)
    assert code == 0
    assert [r["y"] for r in rec["rows"]] == [2.0, 1.0, 1.0, 2.0, 5.0, 13.0]


def test_integrate(capsys):
    code, out = run(capsys, "integrate", "--n", "1", "--method", "quad")
    rec = json.loads(out)
    assert code == 0
    assert abs(rec["residual"]) < 1e-6
    assert rec["target"] == 6.283185307179586


def test_simulate_deterministic(capsys):
    args = ("simulate", "pants", "--L", "1,1,1", "--samples", "3000", "--seed", "4")
    code, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert code == 0
    assert first == second
    rec = json.loads(first)
    assert all(abs(v) < 3 for v in rec["z_scores"].values())


def test_simulate_moebius(capsys):
    code, out = run(capsys, "simulate", "moebius", "--L", "1,1", "--z", "1", "--samples", "2000")
    rec = json.loads(out)
    assert code == 0
    assert rec["fact_ii_violations"] == 0


def test_config_and_output(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"format": "csv", "seed": 3}))
    dest = tmp_path / "out.csv"
    code, out = run(capsys, "fibonacci", "--count", "3", "--config", str(cfg), "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("i,F_2i")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert run(capsys, "fibonacci", "--config", str(bad))[0] == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nonorientable_mcshane", "identity", "punctured-torus"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "punctured-torus"
