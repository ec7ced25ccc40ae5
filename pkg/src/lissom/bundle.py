"""PCC bundles: the ``.lpc`` container and the consumer's verify-then-run gate.

Layout (all integers unsigned 64-bit little-endian)::

    "LPC1"
    u64 len, MANIFEST   canonical JSON object (sorted keys, no whitespace),
                        exactly these keys:
                          format       1
                          entry        entry function name
                          bytecode_sha256, certs_sha256   lowercase hex
                          obligations  number of obligations; must equal the
                                       number the verifier regenerates
    u64 len, BYTECODE   binary module (see ``lissom.vm.binary``)
    u64 len, CERTS      u64 count, then per entry in ascending id order:
                          u64 len, obligation id (ASCII hex)
                          u64 len, certificate text (UTF-8)

Nothing may follow the last section.  The consumer side imports only the
logic, checker, VM and bytecode VC generator.
"""

import hashlib
import json
import logging
import struct
import time
from dataclasses import dataclass, field

from .logic.syntax import free_vars
from .proof.cert import CertSyntaxError, parse_certificate
from .proof.checker import check_certificate
from .vcgen.bytecode import generate_bytecode_obligations
from .vcgen.obligation import SymbolicStackMismatch, UncoveredCycle
from .vm.loader import load_module
from .vm.machine import DEFAULT_FUEL, run
from .vm.module import MalformedModule

log = logging.getLogger(__name__)

MAGIC = b"LPC1"
FORMAT = 1
MANIFEST_KEYS = frozenset({"format", "entry", "bytecode_sha256", "certs_sha256", "obligations"})
_U64 = struct.Struct("<Q")


class BundleFormatError(Exception):
    pass


def sha256(data):
    return hashlib.sha256(data).hexdigest()


@dataclass
class PccBundle:
    manifest: dict
    bytecode: bytes
    certs: dict = field(default_factory=dict)     # obligation id -> certificate text
    raw_certs: bytes = field(default=None, repr=False, compare=False)

    @classmethod
    def build(cls, bytecode, certs, obligations, entry="main"):
        manifest = {
            "format": FORMAT,
            "entry": entry,
            "bytecode_sha256": sha256(bytecode),
            "certs_sha256": sha256(encode_certs(certs)),
            "obligations": obligations,
        }
        return cls(manifest, bytecode, dict(certs))

    def to_bytes(self):
        return encode_bundle(self)


def _u64(n):
    return _U64.pack(n)


def _chunk(b):
    return _u64(len(b)) + b


def encode_certs(certs):
    out = [_u64(len(certs))]
    for k in sorted(certs):
        out.append(_chunk(k.encode("ascii")))
        out.append(_chunk(certs[k].encode("utf-8")))
    return b"".join(out)


def encode_manifest(manifest):
    return json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")


def encode_bundle(b):
    return MAGIC + _chunk(encode_manifest(b.manifest)) + _chunk(b.bytecode) + _chunk(encode_certs(b.certs))


class _Reader:
    def __init__(self, data):
        self.data = bytes(data)
        self.pos = 0

    def u64(self):
        if self.pos + 8 > len(self.data):
            raise BundleFormatError(f"truncated at offset {self.pos}")
        (n,) = _U64.unpack_from(self.data, self.pos)
        self.pos += 8
        return n

    def chunk(self):
        n = self.u64()
        if n > len(self.data) - self.pos:
            raise BundleFormatError(f"section length {n} exceeds the data at offset {self.pos}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out


def decode_certs(data):
    r = _Reader(data)
    n = r.u64()
    if n > len(data):
        raise BundleFormatError("implausible certificate count")
    certs = {}
    prev = None
    for _ in range(n):
        try:
            k = r.chunk().decode("ascii")
            text = r.chunk().decode("utf-8")
        except UnicodeDecodeError as e:
            raise BundleFormatError(f"bad text in certificate section: {e}") from None
        if prev is not None and k <= prev:
            raise BundleFormatError("certificate ids not strictly ascending")
        prev = k
        certs[k] = text
    if r.pos != len(r.data):
        raise BundleFormatError("trailing bytes in certificate section")
    return certs


def decode_bundle(data):
    data = bytes(data)
    if data[:4] != MAGIC:
        raise BundleFormatError("bad magic")
    r = _Reader(data)
    r.pos = 4
    raw_manifest, bytecode, raw_certs = r.chunk(), r.chunk(), r.chunk()
    if r.pos != len(data):
        raise BundleFormatError("trailing bytes after the last section")
    try:
        manifest = json.loads(raw_manifest.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise BundleFormatError(f"bad manifest: {e}") from None
    if not isinstance(manifest, dict):
        raise BundleFormatError("manifest is not an object")
    if set(manifest) != MANIFEST_KEYS:
        raise BundleFormatError("manifest keys differ from " + ", ".join(sorted(MANIFEST_KEYS)))
    if encode_manifest(manifest) != raw_manifest:
        raise BundleFormatError("manifest is not in canonical form")
    return PccBundle(manifest, bytecode, decode_certs(raw_certs), raw_certs)


# -- consumer ---------------------------------------------------------------

@dataclass(frozen=True)
class ObligationVerdict:
    id: str
    function: str
    site: str
    location: str
    accepted: bool
    reason: str = ""


@dataclass
class VerificationReport:
    accepted: bool = False
    reason: str = ""
    verdicts: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def __bool__(self):
        return self.accepted

    def to_dict(self):
        return {
            "accepted": self.accepted,
            "reason": self.reason,
            "obligations": [v.__dict__ for v in self.verdicts],
            "timings_ms": {k: round(v * 1000, 3) for k, v in self.timings.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = [f"verdict: {'ACCEPT' if self.accepted else 'REJECT'}"]
        if self.reason:
            lines.append(f"reason: {self.reason}")
        for v in self.verdicts:
            status = "accept" if v.accepted else f"reject ({v.reason})"
            lines.append(f"  {v.id[:16]}  {v.function:<12} {v.site:<26} {v.location:<8} {status}")
        for k, t in self.timings.items():
            lines.append(f"time {k}: {t * 1000:.1f} ms")
        return "\n".join(lines)


def _reject(report, reason):
    report.accepted = False
    report.reason = reason
    return report


def verify_bundle(bundle):
    """Check a bundle (object or raw bytes); never raises on bad input."""
    report = VerificationReport()
    t0 = time.perf_counter()
    if not isinstance(bundle, PccBundle):
        try:
            bundle = decode_bundle(bundle)
        except BundleFormatError as e:
            return _reject(report, f"malformed bundle: {e}")
    m = bundle.manifest
    if set(m) != MANIFEST_KEYS:
        return _reject(report, "malformed bundle: unexpected manifest keys")
    if m.get("format") != FORMAT:
        return _reject(report, f"unsupported format {m.get('format')!r}")
    if m.get("bytecode_sha256") != sha256(bundle.bytecode):
        return _reject(report, "hash mismatch: bytecode section")
    raw_certs = bundle.raw_certs if bundle.raw_certs is not None else encode_certs(bundle.certs)
    if m.get("certs_sha256") != sha256(raw_certs):
        return _reject(report, "hash mismatch: certificate section")
    try:
        module = load_module(bundle.bytecode)
    except MalformedModule as e:
        return _reject(report, f"load failed: {e}")
    except Exception as e:
        return _reject(report, f"load failed: {type(e).__name__}: {e}")
    entry = module.function(m.get("entry")) if isinstance(m.get("entry"), str) else None
    if entry is None or entry.nparams or entry.ret is not None:
        return _reject(report, "entry function missing or not a void function without parameters")
    t1 = time.perf_counter()
    report.timings["load"] = t1 - t0
    try:
        obligations = generate_bytecode_obligations(module, checked=True)
    except (UncoveredCycle, SymbolicStackMismatch) as e:
        report.timings["vcgen"] = time.perf_counter() - t1
        return _reject(report, f"{type(e).__name__}: {e}")
    except Exception as e:  # defense in depth: adversarial input must not crash us
        report.timings["vcgen"] = time.perf_counter() - t1
        return _reject(report, f"vcgen failed: {type(e).__name__}: {e}")
    t2 = time.perf_counter()
    report.timings["vcgen"] = t2 - t1
    if m.get("obligations") != len(obligations):
        return _reject(report, f"manifest announces {m.get('obligations')!r} obligations, "
                               f"{len(obligations)} regenerated")
    for o in obligations:
        report.verdicts.append(_check_one(o, bundle.certs))
    report.timings["check"] = time.perf_counter() - t2
    bad = [v for v in report.verdicts if not v.accepted]
    if bad:
        return _reject(report, f"{len(bad)} of {len(report.verdicts)} obligations rejected")
    report.accepted = True
    return report


def _check_one(o, certs):
    def verdict(ok, reason=""):
        return ObligationVerdict(o.id, o.function, o.site, o.location, ok, reason)

    text = certs.get(o.id)
    if text is None:
        return verdict(False, "missing certificate")
    try:
        cert = parse_certificate(text, env=free_vars(o.formula))
    except CertSyntaxError as e:
        return verdict(False, f"certificate syntax: {e}")
    except Exception as e:
        return verdict(False, f"certificate unreadable: {type(e).__name__}")
    v = check_certificate(o.formula, cert)
    return verdict(v.ok, "" if v.ok else f"{v.reason} at {v.path}")


class RefusedUnverified(Exception):
    def __init__(self, report):
        super().__init__(f"bundle not verified: {report.reason}")
        self.report = report


def run_verified(bundle, inputs=(), fuel=DEFAULT_FUEL, unsafe=False):
    """Run the bundle's entry function, but only after it verifies.

    ``unsafe`` skips verification entirely (demos only).
    """
    if not isinstance(bundle, PccBundle):
        try:
            bundle = decode_bundle(bundle)
        except BundleFormatError as e:
            raise RefusedUnverified(_reject(VerificationReport(), f"malformed bundle: {e}"))
    if unsafe:
        log.warning("UNSAFE: running unverified bytecode")
        module = load_module(bundle.bytecode)
    else:
        report = verify_bundle(bundle)
        if not report:
            raise RefusedUnverified(report)
        module = load_module(bundle.bytecode)
    return run(module, entry=bundle.manifest.get("entry", "main"), inputs=inputs, fuel=fuel)
