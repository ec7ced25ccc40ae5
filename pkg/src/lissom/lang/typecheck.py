"""Static checks for LISS programs and their annotations.

Besides typing, the checker enforces the structural rules the rest of the
toolchain relies on: unique names per function (no shadowing), calls
forming a DAG, only ``main`` being void, every path of a value function
ending in ``return``, and no ``return`` inside loop bodies.
"""

import re
from dataclasses import dataclass, field

from . import ast as A

_RESERVED = re.compile(r"q\d+\Z")


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    line: int
    col: int
    message: str
    expected: str = None
    found: str = None

    def __str__(self):
        return f"{self.line}:{self.col}: {self.kind}: {self.message}"


class LissTypeError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


@dataclass
class FunInfo:
    decl: A.FunDecl
    slots: dict = field(default_factory=dict)      # name -> slot
    types: dict = field(default_factory=dict)      # name -> type
    callees: list = field(default_factory=list)

    @property
    def name(self):
        return self.decl.name

    @property
    def params(self):
        return [p.name for p in self.decl.params]

    @property
    def ret(self):
        return self.decl.ret

    def names_by_slot(self):
        return sorted(self.slots, key=self.slots.get)


@dataclass
class TypedProgram:
    program: A.Program
    functions: dict            # name -> FunInfo, in program order

    def info(self, name):
        return self.functions[name]


class _Fail(Exception):
    pass


class _Checker:
    def __init__(self, prog):
        self.prog = prog
        self.errors = []
        self.sigs = {}

    def err(self, kind, node, msg, expected=None, found=None):
        line, col = getattr(node, "pos", (0, 0)) or (0, 0)
        self.errors.append(Diagnostic(kind, line, col, msg, expected, found))

    def clash(self, node, expected, found):
        self.err("TypeError", node, f"expected {expected}, found {found}", expected, found)
        raise _Fail()

    # -- program ----------------------------------------------------------

    def run(self):
        infos = {}
        for f in self.prog.functions:
            if f.name in self.sigs:
                self.err("Duplicate", f, f"function {f.name} defined twice")
                continue
            self.sigs[f.name] = ([p.type for p in f.params], f.ret)
        main = self.prog.function("main")
        if main is None:
            self.errors.append(Diagnostic("MissingMain", 1, 1, "program has no main function"))
        elif main.params or main.ret is not None:
            self.err("TypeError", main, "main takes no parameters and returns nothing")
        for f in self.prog.functions:
            if f.name in infos:
                continue
            if f.ret is None and f.name != "main":
                self.err("TypeError", f, f"function {f.name} must return a value (only main is void)")
            infos[f.name] = self.function(f)
        self.check_dag(infos)
        if self.errors:
            raise LissTypeError(self.errors)
        return TypedProgram(self.prog, infos)

    def check_dag(self, infos):
        state = {}

        def visit(n, path):
            state[n] = "active"
            for c in infos[n].callees:
                if c not in infos:
                    continue
                if state.get(c) == "active":
                    self.err("RecursionError", infos[n].decl,
                             "recursive calls are not supported: " + " -> ".join(path + [c]))
                elif c not in state:
                    visit(c, path + [c])
            state[n] = "done"

        for n in infos:
            if n not in state:
                visit(n, [n])

    def function(self, f):
        info = FunInfo(f)
        self.info = info
        scope = {}
        for p in f.params:
            self.declare(p, p.name, p.type, scope)
        params = dict(scope)
        for r in f.requires:
            self.formula(r, params, "requires")
        post = dict(params)
        if f.ret is not None:
            post["\\result"] = f.ret
        for e in f.ensures:
            self.formula(e, post, "ensures")
        returns = self.block(f.body, scope, in_loop=False)
        if f.ret is not None and not returns:
            self.err("ReturnError", f, f"function {f.name} may finish without returning a value")
        return info

    def declare(self, node, name, ty, scope):
        if name in self.info.slots:
            self.err("Duplicate", node, f"variable {name} already declared in {self.info.name}")
            return
        if _RESERVED.match(name):
            self.err("Duplicate", node, f"name {name} is reserved")
        self.info.slots[name] = len(self.info.slots)
        self.info.types[name] = ty
        scope[name] = ty

    # -- statements -------------------------------------------------------

    def block(self, body, scope, in_loop):
        """Check a block; True if it definitely returns."""
        scope = dict(scope)
        returned = False
        for s in body:
            if returned:
                self.err("ReturnError", s, "unreachable statement after return")
                break
            try:
                returned = self.stmt(s, scope, in_loop)
            except _Fail:
                returned = False
        return returned

    def stmt(self, s, scope, in_loop):
        if isinstance(s, A.VarDecl):
            ty = self.expr(s.init, scope)
            if ty != s.type:
                self.clash(s.init, s.type, ty)
            self.declare(s, s.name, s.type, scope)
            return False
        if isinstance(s, A.Assign):
            ty = self.var(s, s.name, scope)
            got = self.expr(s.value, scope)
            if got != ty:
                self.clash(s.value, ty, got)
            return False
        if isinstance(s, A.VecStore):
            ty = self.var(s, s.name, scope)
            if ty != A.VEC:
                self.clash(s, A.VEC, ty)
            self.want(s.index, A.INT, scope)
            self.want(s.value, A.INT, scope)
            return False
        if isinstance(s, A.If):
            self.want(s.cond, A.BOOL, scope)
            a = self.block(s.then, scope, in_loop)
            b = self.block(s.els, scope, in_loop)
            return a and b
        if isinstance(s, A.While):
            self.want(s.cond, A.BOOL, scope)
            self.formula(s.invariant, scope, "invariant")
            self.block(s.body, scope, in_loop=True)
            return False
        if isinstance(s, A.Assert):
            self.formula(s.formula, scope, "assert")
            return False
        if isinstance(s, A.Return):
            if in_loop:
                self.err("ReturnError", s, "return inside a loop body is not supported")
            ret = self.info.ret
            if s.value is None:
                if ret is not None:
                    self.err("ReturnError", s, f"return needs a {ret} value")
            elif ret is None:
                self.err("ReturnError", s, "void function cannot return a value")
            else:
                got = self.expr(s.value, scope)
                if got != ret:
                    self.clash(s.value, ret, got)
            return True
        if isinstance(s, A.Print):
            self.want(s.value, A.INT, scope)
            return False
        raise AssertionError(s)

    def var(self, node, name, scope):
        if name not in scope:
            self.err("UndefinedVariable", node, f"undefined variable {name}")
            raise _Fail()
        return scope[name]

    # -- expressions ------------------------------------------------------

    def want(self, e, ty, scope, mode=None):
        got = self.expr(e, scope, mode)
        if got != ty:
            self.clash(e, ty, got)

    def formula(self, e, scope, mode):
        try:
            self.want(e, A.BOOL, scope, mode)
        except _Fail:
            pass

    def expr(self, e, scope, mode=None):
        ty = self._expr(e, scope, mode)
        e.ty = ty
        return ty

    def spec_only(self, e, mode, what):
        if mode is None:
            self.err("TypeError", e, f"{what} is only allowed in annotations")
            raise _Fail()

    def code_only(self, e, mode, what):
        if mode is not None:
            self.err("TypeError", e, f"{what} is not allowed in annotations")
            raise _Fail()

    def _expr(self, e, scope, mode):
        if isinstance(e, A.IntConst):
            return A.INT
        if isinstance(e, A.BoolConst):
            return A.BOOL
        if isinstance(e, A.Name):
            return self.var(e, e.id, scope)
        if isinstance(e, A.Result):
            if mode != "ensures" or "\\result" not in scope:
                self.err("TypeError", e, "\\result is only allowed in ensures of a value function")
                raise _Fail()
            return scope["\\result"]
        if isinstance(e, A.Old):
            if mode != "ensures":
                self.err("TypeError", e, "\\old is only allowed in ensures")
                raise _Fail()
            if e.id not in self.info.params:
                self.err("UndefinedVariable", e, f"\\old needs a parameter, got {e.id}")
                raise _Fail()
            return self.info.types[e.id]
        if isinstance(e, A.Unary):
            ty = A.INT if e.op == "neg" else A.BOOL
            self.want(e.arg, ty, scope, mode)
            return ty
        if isinstance(e, A.Binary):
            return self.binary(e, scope, mode)
        if isinstance(e, A.Index):
            self.want(e.vec, A.VEC, scope, mode)
            self.want(e.index, A.INT, scope, mode)
            return A.INT
        if isinstance(e, A.SetLiteral):
            for x in e.elems:
                self.want(x, A.INT, scope, mode)
            return A.SET
        if isinstance(e, A.Builtin):
            if e.name == "read":
                self.code_only(e, mode, "read()")
                return A.INT
            arg_ty = {"len": A.VEC, "card": A.SET, "newvec": A.INT}[e.name]
            self.want(e.args[0], arg_ty, scope, mode)
            return A.VEC if e.name == "newvec" else A.INT
        if isinstance(e, A.Call):
            self.code_only(e, mode, "a function call")
            if e.func not in self.sigs:
                self.err("UndefinedVariable", e, f"undefined function {e.func}")
                raise _Fail()
            ptys, ret = self.sigs[e.func]
            if len(ptys) != len(e.args):
                self.err("ArityMismatch", e, f"{e.func} expects {len(ptys)} arguments, got {len(e.args)}",
                         str(len(ptys)), str(len(e.args)))
                raise _Fail()
            for a, t in zip(e.args, ptys):
                self.want(a, t, scope, mode)
            if ret is None:
                self.err("TypeError", e, f"{e.func} returns no value")
                raise _Fail()
            self.info.callees.append(e.func)
            return ret
        if isinstance(e, A.ForallE):
            self.spec_only(e, mode, "forall")
            if e.var in scope or _RESERVED.match(e.var) or e.var in self.info.slots:
                self.err("Duplicate", e, f"bound variable {e.var} clashes with another name")
                raise _Fail()
            inner = dict(scope)
            inner[e.var] = A.INT
            self.want(e.body, A.BOOL, inner, mode)
            return A.BOOL
        raise AssertionError(e)

    def binary(self, e, scope, mode):
        op = e.op
        if op in A.ARITH:
            self.want(e.left, A.INT, scope, mode)
            self.want(e.right, A.INT, scope, mode)
            return A.INT
        if op in A.SETOPS:
            self.want(e.left, A.SET, scope, mode)
            self.want(e.right, A.SET, scope, mode)
            return A.SET
        if op in ("and", "or"):
            self.want(e.left, A.BOOL, scope, mode)
            self.want(e.right, A.BOOL, scope, mode)
            return A.BOOL
        if op in ("==>", "<==>"):
            self.spec_only(e, mode, op)
            self.want(e.left, A.BOOL, scope, mode)
            self.want(e.right, A.BOOL, scope, mode)
            return A.BOOL
        if op in ("<", "<=", ">", ">="):
            self.want(e.left, A.INT, scope, mode)
            self.want(e.right, A.INT, scope, mode)
            return A.BOOL
        if op in ("==", "!="):
            lt = self.expr(e.left, scope, mode)
            if mode is None and lt != A.INT:
                self.clash(e.left, A.INT, lt)
            self.want(e.right, lt, scope, mode)
            return A.BOOL
        if op == "in":
            self.want(e.left, A.INT, scope, mode)
            self.want(e.right, A.SET, scope, mode)
            return A.BOOL
        if op == "subset":
            self.spec_only(e, mode, "subset")
            self.want(e.left, A.SET, scope, mode)
            self.want(e.right, A.SET, scope, mode)
            return A.BOOL
        raise AssertionError(op)


def typecheck(prog):
    """Return a TypedProgram or raise LissTypeError with all diagnostics."""
    return _Checker(prog).run()
