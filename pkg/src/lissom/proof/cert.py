"""Certificate trees and their textual format (``.prf``).

The text is parenthesized prefix notation; formulas and terms inside use
the canonical formula syntax, e.g.::

    (impI (and (le 1 x) (le 2 y))
          (lia (1 1) (andE1 (hyp 0)) (andE2 (hyp 0))))
"""

from dataclasses import dataclass
from fractions import Fraction
import re

from ..logic.canon import Elaborator, ParseError, read_sexprs, to_sexpr_text
from ..logic.syntax import BOOL, INT, Formula, LogicError, Term

MAX_DEPTH = 4000


class CertSyntaxError(Exception):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} (offset {pos})")
        self.pos = pos


class Cert:
    __slots__ = ()


@dataclass(frozen=True)
class Hyp(Cert):
    index: int


@dataclass(frozen=True)
class AndI(Cert):
    left: Cert
    right: Cert


@dataclass(frozen=True)
class AndE1(Cert):
    of: Cert


@dataclass(frozen=True)
class AndE2(Cert):
    of: Cert


@dataclass(frozen=True)
class OrI1(Cert):
    of: Cert
    other: Formula


@dataclass(frozen=True)
class OrI2(Cert):
    of: Cert
    other: Formula


@dataclass(frozen=True)
class OrE(Cert):
    of: Cert
    left: Cert
    right: Cert


@dataclass(frozen=True)
class ImpI(Cert):
    antecedent: Formula
    body: Cert


@dataclass(frozen=True)
class ImpE(Cert):
    imp: Cert
    arg: Cert


@dataclass(frozen=True)
class NotI(Cert):
    formula: Formula
    body: Cert


@dataclass(frozen=True)
class Contra(Cert):
    of: Cert


@dataclass(frozen=True)
class ForallI(Cert):
    var: str
    body: Cert


@dataclass(frozen=True)
class ForallE(Cert):
    of: Cert
    witness: Term


@dataclass(frozen=True)
class Refl(Cert):
    term: Term


@dataclass(frozen=True)
class Rewrite(Cert):
    eq: Cert
    target: Cert
    positions: tuple


@dataclass(frozen=True)
class Eval(Cert):
    formula: Formula


@dataclass(frozen=True)
class Lia(Cert):
    coeffs: tuple
    premises: tuple


@dataclass(frozen=True)
class Axiom(Cert):
    schema: str
    inst: tuple  # ((metavar, Term), ...)


# -- printing ---------------------------------------------------------------

def _frac(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def cert_text(c):
    out = []
    stack = [c]
    # iterative to cope with deep derivations
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        head, parts = _parts(item)
        seq = ["(" + head]
        for p in parts:
            seq.append(" ")
            seq.append(p)
        seq.append(")")
        stack.extend(reversed(seq))
    return "".join(out)


def _parts(c):
    f = to_sexpr_text
    if isinstance(c, Hyp):
        return "hyp", [str(c.index)]
    if isinstance(c, AndI):
        return "andI", [c.left, c.right]
    if isinstance(c, AndE1):
        return "andE1", [c.of]
    if isinstance(c, AndE2):
        return "andE2", [c.of]
    if isinstance(c, OrI1):
        return "orI1", [c.of, f(c.other)]
    if isinstance(c, OrI2):
        return "orI2", [c.of, f(c.other)]
    if isinstance(c, OrE):
        return "orE", [c.of, c.left, c.right]
    if isinstance(c, ImpI):
        return "impI", [f(c.antecedent), c.body]
    if isinstance(c, ImpE):
        return "impE", [c.imp, c.arg]
    if isinstance(c, NotI):
        return "notI", [f(c.formula), c.body]
    if isinstance(c, Contra):
        return "contra", [c.of]
    if isinstance(c, ForallI):
        return "forallI", [c.var, c.body]
    if isinstance(c, ForallE):
        return "forallE", [c.of, f(c.witness)]
    if isinstance(c, Refl):
        return "refl", [f(c.term)]
    if isinstance(c, Rewrite):
        return "rewrite", [c.eq, c.target, "(" + " ".join(str(p) for p in c.positions) + ")"]
    if isinstance(c, Eval):
        return "eval", [f(c.formula)]
    if isinstance(c, Lia):
        return "lia", ["(" + " ".join(_frac(q) for q in c.coeffs) + ")", *c.premises]
    if isinstance(c, Axiom):
        inst = " ".join(f"({k} {f(t)})" for k, t in c.inst)
        return "axiom", [c.schema, "(" + inst + ")"]
    raise TypeError(f"not a certificate: {c!r}")


# -- parsing ----------------------------------------------------------------

_NAT = re.compile(r"\d+\Z")
_RAT = re.compile(r"-?\d+(/\d+)?\Z")


def parse_certificate(text, env=None, metavar_sorts=None):
    """Parse certificate text.

    ``env`` gives sorts of free variables (normally those of the goal);
    ``metavar_sorts`` maps schema id -> {metavar: sort} for axiom nodes.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CertSyntaxError("certificate is not UTF-8", e.start) from None
    if _max_nesting(text) > MAX_DEPTH:
        raise CertSyntaxError("certificate nested too deeply")
    try:
        items = read_sexprs(text)
    except ParseError as e:
        raise CertSyntaxError(str(e), e.pos) from None
    if len(items) != 1:
        raise CertSyntaxError(f"expected one certificate, found {len(items)}")
    if metavar_sorts is None:
        from .axioms import metavar_sorts as _ms

        metavar_sorts = _ms()
    p = _Parser(env or {}, metavar_sorts)
    try:
        return p.cert(items[0], frozenset())
    except (ParseError, LogicError) as e:
        raise CertSyntaxError(str(e)) from None


def _max_nesting(text):
    depth = best = 0
    for ch in text:
        if ch == "(":
            depth += 1
            if depth > best:
                best = depth
        elif ch == ")":
            depth -= 1
    return best


class _Parser:
    def __init__(self, env, metavar_sorts):
        self.env = env
        self.metavar_sorts = metavar_sorts

    def _el(self, bound):
        env = dict(self.env)
        for b in bound:
            env[b] = INT
        return Elaborator(env)

    def formula(self, sx, bound):
        el = self._el(bound)
        el.infer(sx, BOOL)
        return el.formula(sx)

    def term(self, sx, bound, sort=None):
        el = self._el(bound)
        el.infer(sx, sort)
        return el.term(sx, sort)

    def cert(self, sx, bound):
        if not isinstance(sx, list) or not sx or not isinstance(sx[0], str):
            raise CertSyntaxError("expected (rule ...)", getattr(sx, "pos", None))
        head, args = sx[0], sx[1:]
        pos = getattr(head, "pos", None)

        def need(n):
            if len(args) != n:
                raise CertSyntaxError(f"{head} expects {n} arguments", pos)

        if head == "hyp":
            need(1)
            if not isinstance(args[0], str) or not _NAT.match(args[0]):
                raise CertSyntaxError("hyp index must be a natural number", pos)
            return Hyp(int(args[0]))
        if head == "andI":
            need(2)
            return AndI(self.cert(args[0], bound), self.cert(args[1], bound))
        if head in ("andE1", "andE2", "contra"):
            need(1)
            cls = {"andE1": AndE1, "andE2": AndE2, "contra": Contra}[head]
            return cls(self.cert(args[0], bound))
        if head in ("orI1", "orI2"):
            need(2)
            cls = OrI1 if head == "orI1" else OrI2
            return cls(self.cert(args[0], bound), self.formula(args[1], bound))
        if head == "orE":
            need(3)
            return OrE(*(self.cert(a, bound) for a in args))
        if head in ("impI", "notI"):
            need(2)
            cls = ImpI if head == "impI" else NotI
            return cls(self.formula(args[0], bound), self.cert(args[1], bound))
        if head == "impE":
            need(2)
            return ImpE(self.cert(args[0], bound), self.cert(args[1], bound))
        if head == "forallI":
            need(2)
            v = args[0]
            if not isinstance(v, str):
                raise CertSyntaxError("forallI needs a variable name", pos)
            return ForallI(str(v), self.cert(args[1], bound | {str(v)}))
        if head == "forallE":
            need(2)
            return ForallE(self.cert(args[0], bound), self.term(args[1], bound, INT))
        if head == "refl":
            need(1)
            return Refl(self.term(args[0], bound))
        if head == "rewrite":
            need(3)
            ps = args[2]
            if not isinstance(ps, list) or not all(isinstance(p, str) and _NAT.match(p) for p in ps):
                raise CertSyntaxError("rewrite positions must be a list of naturals", pos)
            return Rewrite(self.cert(args[0], bound), self.cert(args[1], bound), tuple(int(p) for p in ps))
        if head == "eval":
            need(1)
            return Eval(self.formula(args[0], bound))
        if head == "lia":
            if len(args) < 1 or not isinstance(args[0], list):
                raise CertSyntaxError("lia needs a coefficient list", pos)
            coeffs = []
            for q in args[0]:
                if not isinstance(q, str) or not _RAT.match(q):
                    raise CertSyntaxError(f"bad coefficient {q!r}", pos)
                try:
                    coeffs.append(Fraction(q))
                except ZeroDivisionError:
                    raise CertSyntaxError("zero denominator", pos) from None
            prem = tuple(self.cert(a, bound) for a in args[1:])
            return Lia(tuple(coeffs), prem)
        if head == "axiom":
            need(2)
            sid = args[0]
            if not isinstance(sid, str) or not isinstance(args[1], list):
                raise CertSyntaxError("axiom needs an id and an instantiation list", pos)
            sorts = self.metavar_sorts.get(str(sid), {})
            inst = []
            for pair in args[1]:
                if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                    raise CertSyntaxError("bad instantiation entry", pos)
                inst.append((str(pair[0]), self.term(pair[1], bound, sorts.get(str(pair[0])))))
            return Axiom(str(sid), tuple(inst))
        raise CertSyntaxError(f"unknown rule {head!r}", pos)
