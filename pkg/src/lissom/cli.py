"""Command-line front end.  Exit codes: 0 success, 1 rejection, 2 usage or I/O error."""

import argparse
import logging
import os
import sys

OK, REJECTED, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE)


def _read(path, binary=False):
    with open(path, "rb" if binary else "r", **({} if binary else {"encoding": "utf-8"})) as fh:
        return fh.read()


def _write(path, data):
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode, **({} if mode == "wb" else {"encoding": "utf-8"})) as fh:
        fh.write(data)


def _emit_vcs(directory, obligations):
    os.makedirs(directory, exist_ok=True)
    rows = ["id\tlevel\tfunction\tsite\tlocation"]
    for o in obligations:
        _write(os.path.join(directory, f"{o.id}.fml"), o.text + "\n")
        rows.append(o.tsv())
    _write(os.path.join(directory, "obligations.tsv"), "\n".join(rows) + "\n")


def _front_end(text):
    from .lang import parse_program, typecheck

    return typecheck(parse_program(text))


def _outcome_lines(out):
    """Printable lines and exit code for a VM or interpreter outcome."""
    lines = [str(v) for v in out.outputs]
    kind = getattr(out, "kind", None)
    if kind is not None:
        where = f"pc {out.pc}" if hasattr(out, "pc") else f"line {out.line}"
        return lines + [f"trap {kind} in {out.function} at {where}"], REJECTED
    if type(out).__name__.endswith("OutOfFuel"):
        return lines + ["out of fuel"], REJECTED
    return lines, OK


# -- commands ---------------------------------------------------------------

def cmd_build(a):
    from .producer import ProducerFailure, produce

    try:
        bundle, module, trace, obligations = produce(_read(a.source), a.prove_budget_ms)
    except ProducerFailure as e:
        print(f"build failed: {e}", file=sys.stderr)
        return REJECTED
    _write(a.output, bundle.to_bytes())
    if a.emit_vcs:
        _emit_vcs(a.emit_vcs, obligations)
    if a.emit_trace:
        _write(a.emit_trace, trace.table())
    print(f"wrote {a.output}: {len(obligations)} obligations certified")
    return OK


def cmd_compile(a):
    from .compiler import compile_program
    from .vm import encode_module, print_lbc

    module, trace = compile_program(_front_end(_read(a.source)))
    if a.output and a.output.endswith(".lbx"):
        _write(a.output, encode_module(module))
    elif a.output:
        _write(a.output, print_lbc(module))
    else:
        sys.stdout.write(print_lbc(module))
    if a.emit_trace:
        _write(a.emit_trace, trace.table())
    return OK


def cmd_verify(a):
    from .bundle import verify_bundle

    report = verify_bundle(_read(a.bundle, binary=True))
    print(report.to_json() if a.report == "json" else report.to_text())
    return OK if report else REJECTED


def cmd_run(a):
    from .bundle import RefusedUnverified, run_verified

    if a.unsafe:
        print("*** UNSAFE MODE: bytecode runs WITHOUT verification ***", file=sys.stderr)
    try:
        out = run_verified(_read(a.bundle, binary=True), a.input or [], a.fuel, unsafe=a.unsafe)
    except RefusedUnverified as e:
        print(f"refused: {e.report.reason}", file=sys.stderr)
        return REJECTED
    lines, code = _outcome_lines(out)
    print("\n".join(lines))
    return code


def cmd_vcgen(a):
    if a.source.endswith(".liss"):
        if a.level == "bytecode":
            from .compiler import compile_program
            from .vcgen import generate_bytecode_obligations

            obligations = generate_bytecode_obligations(compile_program(_front_end(_read(a.source)))[0])
        else:
            from .vcgen import generate_source_obligations

            obligations = generate_source_obligations(_front_end(_read(a.source)))
    else:
        from .vcgen import generate_bytecode_obligations
        from .vm import load_module

        data = _read(a.source, binary=True)
        # the binary form always contains NUL bytes (u64 fields); assembly never does
        if a.source.endswith(".lbc") or b"\0" not in data:
            data = data.decode("utf-8", errors="replace")
        obligations = generate_bytecode_obligations(load_module(data))
    for o in obligations:
        print(f"{o.id[:16]}  {o.function:<12} {o.site:<26} {o.location:<8} {o.text}")
    if a.emit_vcs:
        _emit_vcs(a.emit_vcs, obligations)
    return OK


def cmd_check_cert(a):
    from .logic.canon import parse_closed
    from .proof import check_certificate, parse_certificate

    env, goal = parse_closed(_read(a.vc))
    cert = parse_certificate(_read(a.cert), env=env)
    v = check_certificate(goal, cert)
    print("accept" if v else f"reject: {v.reason} at {v.path}")
    return OK if v else REJECTED


def cmd_prove(a):
    from .logic.canon import parse_closed
    from .proof.cert import cert_text
    from .proof.prover import prove

    _, goal = parse_closed(_read(a.vc))
    r = prove(goal, a.prove_budget_ms)
    if not r:
        print(f"no proof: {r.reason}", file=sys.stderr)
        return REJECTED
    text = cert_text(r)
    if a.output:
        _write(a.output, text + "\n")
    else:
        print(text)
    return OK


def cmd_interp(a):
    from .lang import interpret_source

    out = interpret_source(_front_end(_read(a.source)), a.input or [], fuel=a.fuel)
    lines, code = _outcome_lines(out)
    print("\n".join(lines))
    return code


def build_parser():
    p = _Parser(prog="lissom", description="Proof-carrying code toolchain for LISS programs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("build", help="compile, prove and package a program")
    s.add_argument("source")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--emit-vcs", metavar="DIR")
    s.add_argument("--emit-trace", metavar="FILE")
    s.add_argument("--prove-budget-ms", type=int, default=5000)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("compile", help="lower a program to annotated bytecode")
    s.add_argument("source")
    s.add_argument("-o", "--output", help=".lbc text, or .lbx for the binary form")
    s.add_argument("--emit-trace", metavar="FILE")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("verify", help="check a bundle")
    s.add_argument("bundle")
    s.add_argument("--report", choices=("json", "text"), default="text")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("run", help="verify a bundle, then run it")
    s.add_argument("bundle")
    s.add_argument("--input", type=int, nargs="+", action="extend", metavar="N")
    s.add_argument("--fuel", type=int, default=1_000_000)
    s.add_argument("--unsafe", action="store_true", help="skip verification (demo only)")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("vcgen", help="print verification conditions")
    s.add_argument("source", help=".liss program, .lbc text or binary module")
    s.add_argument("--level", choices=("source", "bytecode"), default="source",
                   help="for .liss input")
    s.add_argument("--emit-vcs", metavar="DIR")
    s.set_defaults(func=cmd_vcgen)

    s = sub.add_parser("check-cert", help="check a certificate against a formula")
    s.add_argument("vc")
    s.add_argument("cert")
    s.set_defaults(func=cmd_check_cert)

    s = sub.add_parser("prove", help="search for a certificate of a formula")
    s.add_argument("vc")
    s.add_argument("-o", "--output")
    s.add_argument("--prove-budget-ms", type=int, default=5000)
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("interp", help="run a program with the source interpreter")
    s.add_argument("source")
    s.add_argument("--input", type=int, nargs="+", action="extend", metavar="N")
    s.add_argument("--fuel", type=int, default=1_000_000)
    s.set_defaults(func=cmd_interp)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    from .lang import LissSyntaxError, LissTypeError
    from .logic.canon import ParseError
    from .proof.cert import CertSyntaxError
    from .vcgen.obligation import SymbolicStackMismatch, UncoveredCycle
    from .vm.module import MalformedModule

    try:
        return args.func(args)
    except OSError as e:
        print(f"lissom: {e}", file=sys.stderr)
        return USAGE
    except (LissSyntaxError, LissTypeError, ParseError, CertSyntaxError) as e:
        print(f"lissom: {e}", file=sys.stderr)
        return USAGE
    except (MalformedModule, UncoveredCycle, SymbolicStackMismatch) as e:
        print(f"lissom: rejected: {e}", file=sys.stderr)
        return REJECTED


if __name__ == "__main__":
    sys.exit(main())
