import json
import random

import pytest

from lissom.bundle import (
    MAGIC, BundleFormatError, PccBundle, RefusedUnverified, _chunk, decode_bundle, encode_bundle,
    run_verified, sha256, verify_bundle,
)
from lissom.producer import ProducerFailure, produce_bundle
from lissom.vm import OutOfFuel, load_module, run

from helpers import built, corpus, input_vectors
from tamper import MUTATIONS


def sum_bytes():
    return built("sum")[0].to_bytes()


def test_sum_bundle_verifies():
    report = verify_bundle(sum_bytes())
    assert report.accepted
    assert set(report.timings) == {"load", "vcgen", "check"}
    assert len(report.verdicts) == 6 and all(v.accepted for v in report.verdicts)


def test_report_serializations():
    report = verify_bundle(sum_bytes())
    d = json.loads(report.to_json())
    assert d["accepted"] is True
    assert {o["site"] for o in d["obligations"]} >= {"invariant-preservation", "postcondition"}
    assert report.to_text().startswith("verdict: ACCEPT")


def test_builds_are_byte_deterministic():
    text = corpus()["vmax"][0]
    assert produce_bundle(text).to_bytes() == produce_bundle(text).to_bytes()


def test_produce_from_path(tmp_path):
    p = tmp_path / "sum.liss"
    p.write_text(corpus()["sum"][0])
    assert produce_bundle(str(p)).to_bytes() == sum_bytes()


def test_wrong_invariant_names_preservation():
    text = corpus()["sum"][0].replace("2 * s == i * (i + 1)", "2 * s == i * (i + 2)")
    with pytest.raises(ProducerFailure) as e:
        produce_bundle(text)
    sites = {u.site for u in e.value.unproven}
    assert "invariant-preservation" in sites
    assert all(u.function == "sum" for u in e.value.unproven)
    assert "invariant-preservation" in str(e.value)


def test_encoding_round_trip():
    b = built("search")[0]
    data = encode_bundle(b)
    again = decode_bundle(data)
    assert again.manifest == b.manifest and again.certs == b.certs and again.bytecode == b.bytecode
    assert data[:4] == b"LPC1"


@pytest.mark.parametrize("data", [b"", b"LPC1", b"XXXX" + bytes(24), b"LPC1" + bytes(8) + bytes(8)])
def test_garbage_bundles(data):
    with pytest.raises(BundleFormatError):
        decode_bundle(data)
    assert not verify_bundle(data)


def test_trailing_bytes_rejected():
    assert "trailing" in verify_bundle(sum_bytes() + b"\0").reason


def test_run_verified_sum():
    assert run_verified(sum_bytes(), [4]).outputs == (10,)
    assert isinstance(run_verified(sum_bytes(), [4], fuel=1), OutOfFuel)


def test_tampered_bundle_refused():
    data = bytearray(sum_bytes())
    data[-5] ^= 0x01
    with pytest.raises(RefusedUnverified) as e:
        run_verified(bytes(data), [4])
    assert "hash mismatch" in e.value.report.reason


def test_unsafe_mode_skips_verification(caplog):
    bad = next(m for m in MUTATIONS if m.name.startswith("sum: loop step")).apply()
    with pytest.raises(RefusedUnverified):
        run_verified(bad, [4])
    assert run_verified(bad, [4], unsafe=True).outputs != (10,)
    assert "UNSAFE" in caplog.text


def test_bytecode_hash_checked_before_certificates():
    b = decode_bundle(sum_bytes())
    b.manifest["bytecode_sha256"] = "0" * 64
    assert verify_bundle(b).reason == "hash mismatch: bytecode section"


def test_obligation_count_must_match():
    b = decode_bundle(sum_bytes())
    b.manifest["obligations"] += 1
    assert "obligations" in verify_bundle(b).reason


@pytest.mark.parametrize("edit", [
    lambda m: m.update(extra=1),
    lambda m: m.pop("obligations"),
])
def test_manifest_keys_are_exact(edit):
    b = decode_bundle(sum_bytes())
    edit(b.manifest)
    assert "manifest keys" in verify_bundle(b.to_bytes()).reason


def test_manifest_must_be_canonical():
    data = sum_bytes()
    spaced = data.replace(b'"format":1', b'"format": 1')
    fixed = spaced[:4] + (int.from_bytes(data[4:12], "little") + 1).to_bytes(8, "little") + spaced[12:]
    assert "canonical" in verify_bundle(fixed).reason


@pytest.mark.parametrize("mutation", MUTATIONS, ids=lambda m: m.name)
def test_curated_mutations_rejected(mutation):
    report = verify_bundle(mutation.apply())
    assert not report.accepted and report.reason


def _rehashed_flip(rng, section):
    b = decode_bundle(sum_bytes())
    data = bytearray(getattr(b, section) if section == "bytecode" else b.raw_certs)
    pos = rng.randrange(len(data))
    data[pos] ^= rng.randrange(1, 256)
    if section == "bytecode":
        return PccBundle.build(bytes(data), b.certs, b.manifest["obligations"]).to_bytes()
    manifest = dict(b.manifest, certs_sha256=sha256(bytes(data)))
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode()
    return MAGIC + _chunk(blob) + _chunk(b.bytecode) + _chunk(bytes(data))


@pytest.mark.parametrize("section", ["bytecode", "certs"])
def test_rehashed_corruption_never_crashes(section):
    """Flips with recomputed hashes reach the loader, VC generator and checker."""
    rng = random.Random(section)
    for _ in range(200):
        data = _rehashed_flip(rng, section)
        if verify_bundle(data):
            # harmless flips (a label name, say) may pass, but then the
            # guarantee must still hold at run time
            module = load_module(decode_bundle(data).bytecode)
            for inputs in input_vectors(1):
                out = run(module, inputs=inputs, spec_monitor=True)
                assert getattr(out, "kind", "InputExhausted") == "InputExhausted"
