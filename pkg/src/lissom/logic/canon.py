"""Canonical prefix text for terms and formulas, and its parser.

Binders are renamed by nesting depth to ``q0``, ``q1``, ...; names of the
form ``q<digits>`` are therefore reserved for bound variables.
"""

import re

from .syntax import (
    ARITH_OPS, ATOM_OPS, BOOL, INT, SET, SET_OPS, SORTS, VEC, And, Atom,
    BinOp, BVar, Card, FALSE, FalseF, Forall, Formula, Idx, Imp, IntLit, Len,
    LogicError, NewVec, Not, Or, SetLit, TRUE, TrueF, Upd, Var,
)


class ParseError(LogicError):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} at offset {pos}")
        self.pos = pos


RESERVED = re.compile(r"q\d+\Z")


def canonical_text(f):
    """Canonical serialization of ``f`` as bytes."""
    return to_text(f).encode("utf-8")


def to_text(node, _env=None, _depth=0):
    env = _env or {}
    out = []
    _emit(node, env, _depth, out)
    return "".join(out)


_UNARY = {Len: "len", Card: "card", Not: "not", NewVec: "newvec"}
_BINARY_F = {And: "and", Or: "or", Imp: "imp"}


def _emit(n, env, depth, out):
    if isinstance(n, IntLit):
        out.append(str(n.value))
    elif isinstance(n, (Var, BVar)):
        out.append(env.get(n.name, n.name))
    elif isinstance(n, TrueF):
        out.append("true")
    elif isinstance(n, FalseF):
        out.append("false")
    elif isinstance(n, (BinOp, Atom)):
        _app(n.op, (n.left, n.right), env, depth, out)
    elif type(n) in _BINARY_F:
        _app(_BINARY_F[type(n)], (n.left, n.right), env, depth, out)
    elif type(n) in _UNARY:
        _app(_UNARY[type(n)], (n.arg if not isinstance(n, NewVec) else n.length,), env, depth, out)
    elif isinstance(n, Idx):
        _app("idx", (n.vec, n.index), env, depth, out)
    elif isinstance(n, Upd):
        _app("upd", (n.vec, n.index, n.value), env, depth, out)
    elif isinstance(n, SetLit):
        _app("set", n.elems, env, depth, out)
    elif isinstance(n, Forall):
        q = f"q{depth}"
        inner = dict(env)
        inner[n.var] = q
        out.append(f"(forall {q} ")
        _emit(n.body, inner, depth + 1, out)
        out.append(")")
    else:
        raise LogicError(f"cannot serialize {n!r}")


def _app(head, args, env, depth, out):
    out.append("(" + head)
    for a in args:
        out.append(" ")
        _emit(a, env, depth, out)
    out.append(")")


def closed_text(f):
    """Canonical text of the universal closure of ``f``.

    Free variables are listed with their sorts in name order, so the text
    determines the formula completely.
    """
    from .syntax import free_vars

    fv = free_vars(f)
    decls = " ".join(f"({n} {fv[n]})" for n in sorted(fv))
    return f"(closed ({decls}) {to_text(f)})"


# -- reading ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def read_sexprs(text):
    """Parse text into nested lists of atoms; returns (list of sexprs)."""
    pos = 0
    stack = [[]]
    starts = []
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError("unexpected character", pos)
        if m.group(1):
            stack.append([])
            starts.append(m.start(1))
        elif m.group(2):
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", m.start(2))
            done = stack.pop()
            starts.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(_Atom(m.group(3), m.start(3)))
        pos = m.end()
    if len(stack) != 1:
        raise ParseError("unexpected end of input", starts[-1] if starts else n)
    return stack[0]


class _Atom(str):
    def __new__(cls, s, pos):
        obj = super().__new__(cls, s)
        obj.pos = pos
        return obj


def read_one(text):
    items = read_sexprs(text)
    if len(items) != 1:
        raise ParseError(f"expected one expression, found {len(items)}", 0)
    return items[0]


_INT = re.compile(r"-?\d+\Z")
_NAME = re.compile(r"[^\s()\d-][^\s()]*\Z")

_TERM_SIG = {
    "add": (INT, (INT, INT)), "sub": (INT, (INT, INT)), "mul": (INT, (INT, INT)),
    "div": (INT, (INT, INT)), "mod": (INT, (INT, INT)),
    "union": (SET, (SET, SET)), "inter": (SET, (SET, SET)), "diff": (SET, (SET, SET)),
    "len": (INT, (VEC,)), "card": (INT, (SET,)), "idx": (INT, (VEC, INT)),
    "upd": (VEC, (VEC, INT, INT)), "newvec": (VEC, (INT,)),
}
_ATOM_SIG = {"lt": (INT, INT), "le": (INT, INT), "mem": (INT, SET), "subset": (SET, SET)}


def _pos(x):
    return getattr(x, "pos", None)


class Elaborator:
    """Turns s-expressions into typed nodes.

    Variable sorts come from ``env`` when present, else from the first
    position that forces one; unconstrained variables default to ``int``.
    """

    def __init__(self, env=None):
        self.env = dict(env or {})

    def infer(self, sx, want):
        """Pre-pass collecting sorts of free variables."""
        self._infer(sx, want, set())

    def _infer(self, sx, want, bound):
        if isinstance(sx, str):
            if _INT.match(sx) or sx in ("true", "false") or sx in bound:
                return
            if want is not None and sx not in self.env:
                self.env[sx] = want
            return
        if not sx or not isinstance(sx[0], str):
            return
        head, args = sx[0], sx[1:]
        if head == "forall" and len(args) == 2 and isinstance(args[0], str):
            self._infer(args[1], BOOL, bound | {args[0]})
        elif head in _TERM_SIG:
            for a, s in zip(args, _TERM_SIG[head][1]):
                self._infer(a, s, bound)
        elif head in _ATOM_SIG:
            for a, s in zip(args, _ATOM_SIG[head]):
                self._infer(a, s, bound)
        elif head in ("not", "and", "or", "imp"):
            for a in args:
                self._infer(a, BOOL, bound)
        elif head == "set":
            for a in args:
                self._infer(a, INT, bound)
        elif head == "eq" and len(args) == 2:
            s = self._guess(args[0], bound) or self._guess(args[1], bound)
            for a in args:
                self._infer(a, s, bound)

    def _guess(self, sx, bound):
        if isinstance(sx, str):
            if _INT.match(sx):
                return INT
            if sx in bound:
                return INT
            return self.env.get(sx)
        if sx and isinstance(sx[0], str):
            if sx[0] in _TERM_SIG:
                return _TERM_SIG[sx[0]][0]
            if sx[0] == "set":
                return SET
        return None

    def formula(self, sx, bound=frozenset()):
        if isinstance(sx, str):
            if sx == "true":
                return TRUE
            if sx == "false":
                return FALSE
            if sx in bound or not _NAME.match(sx):
                raise ParseError(f"expected formula, found {sx!r}", _pos(sx))
            sort = self.env.get(sx, BOOL)
            if sort != BOOL:
                raise ParseError(f"variable {sx} of sort {sort} used as formula", _pos(sx))
            return BVar(str(sx))
        if not sx or not isinstance(sx[0], str):
            raise ParseError("malformed formula", None)
        head, args = sx[0], sx[1:]
        if head == "not":
            self._arity(sx, 1)
            return Not(self.formula(args[0], bound))
        if head in ("and", "or", "imp"):
            self._arity(sx, 2)
            cls = {"and": And, "or": Or, "imp": Imp}[head]
            return cls(self.formula(args[0], bound), self.formula(args[1], bound))
        if head == "forall":
            self._arity(sx, 2)
            v = args[0]
            if not isinstance(v, str) or not _NAME.match(v):
                raise ParseError("bad binder", _pos(head))
            return Forall(str(v), self.formula(args[1], bound | {str(v)}))
        if head in _ATOM_SIG:
            self._arity(sx, 2)
            s1, s2 = _ATOM_SIG[head]
            return Atom(head, self.term(args[0], s1, bound), self.term(args[1], s2, bound))
        if head == "eq":
            self._arity(sx, 2)
            s = self._guess(args[0], bound) or self._guess(args[1], bound) or INT
            if s == BOOL:
                raise ParseError("eq over booleans", _pos(head))
            return Atom("eq", self.term(args[0], s, bound), self.term(args[1], s, bound))
        raise ParseError(f"unknown formula head {head!r}", _pos(head))

    def term(self, sx, want, bound=frozenset()):
        if isinstance(sx, str):
            if _INT.match(sx):
                t = IntLit(int(sx))
            elif sx in bound:
                t = Var(str(sx), INT)
            elif _NAME.match(sx) and sx not in ("true", "false"):
                sort = self.env.get(sx, want or INT)
                if sort == BOOL:
                    raise ParseError(f"boolean {sx} used as term", _pos(sx))
                t = Var(str(sx), sort)
            else:
                raise ParseError(f"bad term {sx!r}", _pos(sx))
        else:
            if not sx or not isinstance(sx[0], str):
                raise ParseError("malformed term", None)
            head, args = sx[0], sx[1:]
            if head == "set":
                t = SetLit(tuple(self.term(a, INT, bound) for a in args))
            elif head in _TERM_SIG:
                res, sig = _TERM_SIG[head]
                self._arity(sx, len(sig))
                kids = [self.term(a, s, bound) for a, s in zip(args, sig)]
                if head in ARITH_OPS or head in SET_OPS:
                    t = BinOp(head, kids[0], kids[1])
                elif head == "len":
                    t = Len(kids[0])
                elif head == "card":
                    t = Card(kids[0])
                elif head == "idx":
                    t = Idx(kids[0], kids[1])
                elif head == "upd":
                    t = Upd(kids[0], kids[1], kids[2])
                else:
                    t = NewVec(kids[0])
            else:
                raise ParseError(f"unknown term head {head!r}", _pos(head))
        from .syntax import sort_of

        if want is not None and sort_of(t) != want:
            raise ParseError(f"expected {want} term, found {sort_of(t)}", _pos(sx) if isinstance(sx, str) else None)
        return t

    @staticmethod
    def _arity(sx, n):
        if len(sx) - 1 != n:
            raise ParseError(f"{sx[0]} expects {n} arguments", _pos(sx[0]))


def parse_formula(text, env=None):
    """Inverse of :func:`canonical_text` (binder names stay as written)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    sx = read_one(text)
    el = Elaborator(env)
    el.infer(sx, BOOL)
    return el.formula(sx)


def parse_term(text, env=None, sort=None):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    sx = read_one(text)
    el = Elaborator(env)
    el.infer(sx, sort)
    return el.term(sx, sort)


def parse_closed(text):
    """Parse ``(closed ((x int) ...) body)``; returns (env, formula)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    sx = read_one(text)
    if not (isinstance(sx, list) and len(sx) == 3 and sx[0] == "closed" and isinstance(sx[1], list)):
        raise ParseError("expected (closed (decls) formula)", 0)
    env = {}
    for d in sx[1]:
        if not (isinstance(d, list) and len(d) == 2 and isinstance(d[0], str) and d[1] in SORTS):
            raise ParseError("bad declaration", None)
        env[str(d[0])] = str(d[1])
    el = Elaborator(env)
    return env, el.formula(sx[2])


def to_sexpr_text(node):
    """Non-normalizing text (keeps binder names); used by certificates."""
    out = []
    _emit_raw(node, out)
    return "".join(out)


def _emit_raw(n, out):
    if isinstance(n, Forall):
        out.append(f"(forall {n.var} ")
        _emit_raw(n.body, out)
        out.append(")")
        return
    if isinstance(n, (Var, BVar, IntLit, TrueF, FalseF)):
        _emit(n, {}, 0, out)
        return
    # reuse the canonical emitter for the node head, raw for children
    head = _head(n)
    kids = _kids(n)
    out.append("(" + head)
    for k in kids:
        out.append(" ")
        _emit_raw(k, out)
    out.append(")")


def _head(n):
    if isinstance(n, (BinOp, Atom)):
        return n.op
    if type(n) in _BINARY_F:
        return _BINARY_F[type(n)]
    if type(n) in _UNARY:
        return _UNARY[type(n)]
    if isinstance(n, Idx):
        return "idx"
    if isinstance(n, Upd):
        return "upd"
    if isinstance(n, SetLit):
        return "set"
    raise LogicError(f"cannot serialize {n!r}")


def _kids(n):
    from .syntax import children

    return children(n)


__all__ = [
    "ParseError", "canonical_text", "closed_text", "parse_closed", "parse_formula",
    "parse_term", "read_sexprs", "to_sexpr_text", "to_text", "Elaborator",
    "ATOM_OPS", "Formula",
]
