"""Recursive-descent parser.

Grammar (lowest precedence first)::

    expr    := iff
    iff     := imp ('<==>' imp)*
    imp     := or ('==>' imp)?                 right associative
    or      := and ('or' and)*
    and     := not ('and' not)*
    not     := 'not' not | cmp
    cmp     := sum (('=='|'='|'!='|'<'|'<='|'>'|'>='|'in'|'subset') sum)?
    sum     := prod (('+'|'-'|'union'|'inter'|'diff') prod)*
    prod    := unary (('*'|'div'|'mod') unary)*
    unary   := '-' unary | postfix
    postfix := primary ('[' expr ']')*
    primary := INT | true | false | IDENT | IDENT '(' args ')' | '(' expr ')'
             | '{' args '}' | len/card/newvec '(' expr ')' | read '(' ')'
             | '\\result' | '\\old' '(' IDENT ')' | forall IDENT '::' expr
"""

from . import ast as A
from .lexer import LexError, tokenize


class LissSyntaxError(Exception):
    def __init__(self, msg, line, col, expected=()):
        self.line, self.col = line, col
        self.expected = tuple(sorted(set(expected)))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{col}: {msg}{detail}")


_CMP = {"==": "==", "=": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">=",
        "in": "in", "subset": "subset"}


def parse_program(text):
    try:
        toks = tokenize(text)
    except LexError as e:
        raise LissSyntaxError(str(e).split(": ", 1)[1], e.line, e.col) from None
    return _Parser(toks).program()


def parse_expr(text):
    try:
        toks = tokenize(text)
    except LexError as e:
        raise LissSyntaxError(str(e).split(": ", 1)[1], e.line, e.col) from None
    p = _Parser(toks)
    e = p.expr()
    p.expect("eof")
    return e


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0
        self.expected = set()

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, *kinds):
        self.expected.update(kinds)
        return self.tok.kind in kinds

    def advance(self):
        t = self.tok
        self.i += 1
        self.expected = set()
        return t

    def accept(self, *kinds):
        if self.at(*kinds):
            return self.advance()
        return None

    def expect(self, *kinds):
        if self.at(*kinds):
            return self.advance()
        self.fail()

    def fail(self, msg=None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise LissSyntaxError(msg or f"unexpected {found}", t.line, t.col, self.expected)

    @staticmethod
    def pos(t):
        return (t.line, t.col)

    # -- declarations -----------------------------------------------------

    def program(self):
        funcs = []
        while not self.at("eof"):
            funcs.append(self.function())
        return A.Program(tuple(funcs))

    def function(self):
        start = self.expect("fun")
        name = self.expect("ident").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                t = self.expect("ident")
                self.expect(":")
                params.append(A.Param(t.text, self.type(), self.pos(t)))
                if not self.accept(","):
                    break
        self.expect(")")
        ret = self.type() if self.accept(":") else None
        requires, ensures = [], []
        while True:
            if self.accept("requires"):
                requires.append(self.expr())
            elif self.accept("ensures"):
                ensures.append(self.expr())
            else:
                break
        body = self.block()
        return A.FunDecl(name, tuple(params), ret, tuple(requires), tuple(ensures), body, self.pos(start))

    def type(self):
        return self.expect(*A.TYPES).kind

    def block(self):
        self.expect("{")
        out = []
        while not self.at("}"):
            out.append(self.stmt())
        self.advance()
        return tuple(out)

    # -- statements -------------------------------------------------------

    def stmt(self):
        t = self.tok
        p = self.pos(t)
        if self.accept("var"):
            name = self.expect("ident").text
            self.expect(":")
            ty = self.type()
            self.expect(":=")
            init = self.expr()
            self.expect(";")
            return A.VarDecl(name, ty, init, p)
        if self.accept("if"):
            return self.if_rest(p)
        if self.accept("while"):
            cond = self.expr()
            self.expect("invariant")
            inv = self.expr()
            return A.While(cond, inv, self.block(), p)
        if self.accept("assert"):
            f = self.expr()
            self.expect(";")
            return A.Assert(f, p)
        if self.accept("return"):
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return A.Return(value, p)
        if self.accept("print"):
            e = self.expr()
            self.expect(";")
            return A.Print(e, p)
        if self.at("ident"):
            name = self.advance().text
            if self.accept("["):
                idx = self.expr()
                self.expect("]")
                self.expect(":=")
                e = self.expr()
                self.expect(";")
                return A.VecStore(name, idx, e, p)
            self.expect(":=")
            e = self.expr()
            self.expect(";")
            return A.Assign(name, e, p)
        self.fail()

    def if_rest(self, p):
        cond = self.expr()
        then = self.block()
        els = ()
        if self.accept("else"):
            if self.at("if"):
                t = self.advance()
                els = (self.if_rest(self.pos(t)),)
            else:
                els = self.block()
        return A.If(cond, then, els, p)

    # -- expressions ------------------------------------------------------

    def expr(self):
        return self.iff()

    def iff(self):
        e = self.imp()
        while self.at("<==>"):
            t = self.advance()
            e = A.Binary("<==>", e, self.imp(), self.pos(t))
        return e

    def imp(self):
        e = self.or_()
        if self.at("==>"):
            t = self.advance()
            return A.Binary("==>", e, self.imp(), self.pos(t))
        return e

    def or_(self):
        e = self.and_()
        while self.at("or"):
            t = self.advance()
            e = A.Binary("or", e, self.and_(), self.pos(t))
        return e

    def and_(self):
        e = self.not_()
        while self.at("and"):
            t = self.advance()
            e = A.Binary("and", e, self.not_(), self.pos(t))
        return e

    def not_(self):
        if self.at("not"):
            t = self.advance()
            return A.Unary("not", self.not_(), self.pos(t))
        return self.cmp()

    def cmp(self):
        e = self.sum()
        if self.at(*_CMP):
            t = self.advance()
            e = A.Binary(_CMP[t.kind], e, self.sum(), self.pos(t))
        return e

    def sum(self):
        e = self.prod()
        while self.at("+", "-", "union", "inter", "diff"):
            t = self.advance()
            e = A.Binary(t.kind, e, self.prod(), self.pos(t))
        return e

    def prod(self):
        e = self.unary()
        while self.at("*", "div", "mod"):
            t = self.advance()
            e = A.Binary(t.kind, e, self.unary(), self.pos(t))
        return e

    def unary(self):
        if self.at("-"):
            t = self.advance()
            return A.Unary("neg", self.unary(), self.pos(t))
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.at("["):
            t = self.advance()
            idx = self.expr()
            self.expect("]")
            e = A.Index(e, idx, self.pos(t))
        return e

    def args(self, close):
        out = []
        if not self.at(close):
            while True:
                out.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(close)
        return tuple(out)

    def primary(self):
        t = self.tok
        p = self.pos(t)
        if self.accept("int"):
            return A.IntConst(int(t.text), p)
        if self.accept("true", "false"):
            return A.BoolConst(t.kind == "true", p)
        if self.accept("ident"):
            if self.accept("("):
                return A.Call(t.text, self.args(")"), p)
            return A.Name(t.text, p)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("{"):
            return A.SetLiteral(self.args("}"), p)
        if self.accept("len", "card", "newvec"):
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return A.Builtin(t.kind, (arg,), p)
        if self.accept("read"):
            self.expect("(")
            self.expect(")")
            return A.Builtin("read", (), p)
        if self.accept("\\result"):
            return A.Result(p)
        if self.accept("\\old"):
            self.expect("(")
            name = self.expect("ident").text
            self.expect(")")
            return A.Old(name, p)
        if self.accept("forall"):
            v = self.expect("ident").text
            self.expect("::")
            return A.ForallE(v, self.expr(), p)
        self.fail()
