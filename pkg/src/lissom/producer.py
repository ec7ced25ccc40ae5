"""Producer pipeline: source program to certified bundle."""

from dataclasses import dataclass

from .bundle import PccBundle
from .compiler import VarMap, compile_program, translate_formula
from .lang.parser import parse_program
from .lang.typecheck import typecheck
from .proof.cert import cert_text
from .proof.prover import prove
from .vcgen.bytecode import generate_bytecode_obligations
from .vcgen.obligation import Obligation
from .vcgen.source import generate_source_obligations
from .vm.binary import encode_module

DEFAULT_BUDGET_MS = 5000


@dataclass(frozen=True)
class Unproven:
    id: str
    function: str
    site: str
    location: str
    reason: str

    def __str__(self):
        return f"{self.function} {self.site} at {self.location}: {self.reason} [{self.id[:12]}]"


class ProducerFailure(Exception):
    def __init__(self, unproven, message=None):
        self.unproven = list(unproven)
        super().__init__(message or "unproven obligations:\n"
                         + "\n".join(f"  {u}" for u in self.unproven))


def translated_source_obligations(tp):
    """Source obligations renamed into bytecode variable names."""
    out = []
    for o in generate_source_obligations(tp):
        vm = VarMap.of(tp.info(o.function))
        out.append(Obligation.make(translate_formula(o.formula, vm), o.level, o.function,
                                   o.site, o.location))
    return out


def prove_obligations(obligations, budget_ms=DEFAULT_BUDGET_MS):
    """Certificates by id, plus the list of failures."""
    certs, failed = {}, []
    for o in obligations:
        if o.id in certs:
            continue
        r = prove(o.formula, budget_ms)
        if r:
            certs[o.id] = cert_text(r)
        else:
            failed.append(Unproven(o.id, o.function, o.site, o.location,
                                   getattr(r, "reason", "no proof found")))
    return certs, failed


def produce(source, budget_ms=DEFAULT_BUDGET_MS):
    """Build a bundle from program text; returns ``(bundle, module, trace, obligations)``."""
    tp = typecheck(parse_program(source))
    src_obs = translated_source_obligations(tp)
    certs, failed = prove_obligations(src_obs, budget_ms)
    if failed:
        raise ProducerFailure(failed)
    module, trace = compile_program(tp)
    bc_obs = generate_bytecode_obligations(module)
    missing = [o for o in bc_obs if o.id not in certs]
    if missing:
        raise ProducerFailure(
            [Unproven(o.id, o.function, o.site, o.location, "no matching source obligation")
             for o in missing],
            "internal error: bytecode obligations without source counterpart")
    used = {o.id: certs[o.id] for o in bc_obs}
    bundle = PccBundle.build(encode_module(module), used, len(bc_obs))
    return bundle, module, trace, bc_obs


def produce_bundle(source, budget_ms=DEFAULT_BUDGET_MS):
    """``source`` is program text or a path to a ``.liss`` file."""
    if not isinstance(source, str) or ("\n" not in source and source.endswith(".liss")):
        with open(source, encoding="utf-8") as fh:
            source = fh.read()
    return produce(source, budget_ms)[0]
