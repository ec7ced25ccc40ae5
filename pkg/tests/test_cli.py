import json
import subprocess
import sys

import pytest

from lissom.cli import main

from helpers import corpus


@pytest.fixture
def sum_src(tmp_path):
    p = tmp_path / "sum.liss"
    p.write_text(corpus()["sum"][0])
    return p


def cli(*args):
    return main([str(a) for a in args])


def test_build_verify_run(tmp_path, sum_src, capsys):
    out = tmp_path / "sum.lpc"
    vcs, trace = tmp_path / "vcs", tmp_path / "trace.tsv"
    assert cli("build", sum_src, "-o", out, "--emit-vcs", vcs, "--emit-trace", trace) == 0
    index = (vcs / "obligations.tsv").read_text().splitlines()
    assert index[0].startswith("id\tlevel") and len(index) == 7
    assert len(list(vcs.glob("*.fml"))) == 6
    assert "loop-head" in trace.read_text()

    capsys.readouterr()
    assert cli("verify", out, "--report", "json") == 0
    assert json.loads(capsys.readouterr().out)["accepted"] is True

    assert cli("run", out, "--input", 4) == 0
    assert capsys.readouterr().out.split() == ["10"]


def test_run_refuses_tampered_bundle(tmp_path, sum_src, capsys):
    out = tmp_path / "sum.lpc"
    cli("build", sum_src, "-o", out)
    data = bytearray(out.read_bytes())
    data[40] ^= 0xFF
    out.write_bytes(bytes(data))
    assert cli("verify", out) == 1
    assert cli("run", out, "--input", 4) == 1
    assert "refused" in capsys.readouterr().err


def test_unsafe_run_is_loud(tmp_path, sum_src, capsys):
    out = tmp_path / "sum.lpc"
    cli("build", sum_src, "-o", out)
    assert cli("run", out, "--input", 4, "--unsafe") == 0
    assert "UNSAFE" in capsys.readouterr().err


def test_build_failure_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.liss"
    p.write_text(corpus()["sum"][0].replace("i * (i + 1)", "i * i"))
    assert cli("build", p, "-o", tmp_path / "bad.lpc") == 1
    assert "invariant" in capsys.readouterr().err


def test_compile_and_vcgen_from_assembly(tmp_path, sum_src, capsys):
    lbc, lbx = tmp_path / "sum.lbc", tmp_path / "sum.lbx"
    assert cli("compile", sum_src, "-o", lbc) == 0
    assert cli("compile", sum_src, "-o", lbx) == 0
    capsys.readouterr()
    assert cli("vcgen", lbc) == 0
    text_rows = capsys.readouterr().out.splitlines()
    assert cli("vcgen", lbx) == 0
    assert capsys.readouterr().out.splitlines() == text_rows
    assert cli("vcgen", sum_src, "--level", "bytecode") == 0
    assert sorted(capsys.readouterr().out.splitlines()) == sorted(text_rows)


def test_prove_and_check_cert(tmp_path, capsys):
    vc = tmp_path / "goal.fml"
    vc.write_text("(closed ((x int)) (imp (le 0 x) (le 1 (add x 1))))")
    prf = tmp_path / "goal.prf"
    assert cli("prove", vc, "-o", prf) == 0
    assert cli("check-cert", vc, prf) == 0
    assert capsys.readouterr().out.strip() == "accept"
    bad = tmp_path / "bad.fml"
    bad.write_text("(closed ((x int)) (lt x x))")
    assert cli("prove", bad) == 1
    assert cli("check-cert", bad, prf) == 1


def test_interp(sum_src, capsys):
    assert cli("interp", sum_src, "--input", 4) == 0
    assert capsys.readouterr().out.split() == ["10"]
    assert cli("interp", sum_src) == 1
    assert "InputExhausted" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert cli("verify", tmp_path / "missing.lpc") == 2
    bad = tmp_path / "bad.liss"
    bad.write_text("fun main( {")
    assert cli("compile", bad) == 2
    with pytest.raises(SystemExit) as e:
        cli("frobnicate")
    assert e.value.code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lissom.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
