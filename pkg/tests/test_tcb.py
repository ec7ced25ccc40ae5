"""The consumer's trusted base must not reach the producer-side code."""

import subprocess
import sys
import textwrap

import pytest

from helpers import _BLOCKER, PRODUCER_SIDE, built, loaded, run_isolated

def test_checker_reaches_only_the_logic():
    banned = PRODUCER_SIDE + ["lissom.vcgen", "lissom.vm", "lissom.bundle"]
    out = run_isolated(banned, f"""
        import json
        from lissom.logic import Forall, Var, eq
        from lissom.proof.checker import check_certificate
        from lissom.proof.cert import ForallI, Refl
        ok = bool(check_certificate(Forall("i", eq(Var("i"), Var("i"))), ForallI("i", Refl(Var("i")))))
        print(json.dumps({{"ok": ok, "loaded": {loaded(banned)}}}))
    """)
    assert out == {"ok": True, "loaded": []}


def test_verify_bundle_runs_without_producer_code(tmp_path):
    path = tmp_path / "sum.lpc"
    path.write_bytes(built("sum")[0].to_bytes())
    out = run_isolated(PRODUCER_SIDE, f"""
        import json
        from lissom.bundle import run_verified, verify_bundle
        data = open({str(path)!r}, "rb").read()
        report = verify_bundle(data)
        outputs = list(run_verified(data, [4]).outputs)
        print(json.dumps({{"accepted": report.accepted, "outputs": outputs,
                          "loaded": {loaded(PRODUCER_SIDE)}}}))
    """)
    assert out == {"accepted": True, "outputs": [10], "loaded": []}


@pytest.mark.parametrize("module", ["lissom.proof.checker", "lissom.bundle"])
def test_blocker_is_effective(module):
    # sanity: blocking the module itself makes the import fail
    code = textwrap.dedent(_BLOCKER.format(blocked=[module])) + f"import {module}\n"
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode != 0 and "blocked import" in proc.stderr
