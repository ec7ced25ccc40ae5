"""Translation of typed LISS expressions into logic terms and formulas.

The same translation serves annotations and program expressions.  Partial
operations report a guard through ``on_guard(kind, formula)`` after their
operands have been translated, i.e. in evaluation order; calls and
``read()`` are delegated to hooks that return the logical stand-in.
"""

from ..logic import syntax as L
from . import ast as A

SORT = {A.INT: L.INT, A.BOOL: L.BOOL, A.SET: L.SET, A.VEC: L.VEC}


def logical_var(name, ty):
    return L.BVar(name) if ty == A.BOOL else L.Var(name, SORT[ty])


class ToLogic:
    def __init__(self, name_of=None, on_guard=None, on_call=None, on_read=None):
        self.name_of = name_of or (lambda n: n)
        self.on_guard = on_guard or (lambda kind, g: None)
        self.on_call = on_call
        self.on_read = on_read
        self.bound = []

    def __call__(self, e):
        return self.formula(e) if e.ty == A.BOOL else self.term(e)

    def var(self, e):
        name = e.id if e.id in self.bound else self.name_of(e.id)
        return logical_var(name, e.ty)

    # -- terms ------------------------------------------------------------

    def term(self, e):
        if isinstance(e, A.IntConst):
            return L.IntLit(e.value)
        if isinstance(e, A.Name):
            return self.var(e)
        if isinstance(e, A.Old):
            return logical_var("\\old_" + self.name_of(e.id), e.ty)
        if isinstance(e, A.Result):
            return logical_var("\\result", e.ty)
        if isinstance(e, A.Unary) and e.op == "neg":
            if isinstance(e.arg, A.IntConst):
                return L.IntLit(-e.arg.value)
            return L.sub(L.IntLit(0), self.term(e.arg))
        if isinstance(e, A.Binary):
            a, b = self.term(e.left), self.term(e.right)
            op = {"+": "add", "-": "sub", "*": "mul", "div": "div", "mod": "mod",
                  "union": "union", "inter": "inter", "diff": "diff"}[e.op]
            if op in ("div", "mod") and not (isinstance(b, L.IntLit) and b.value != 0):
                self.on_guard("DivByZero", L.Not(L.eq(b, L.IntLit(0))))
            return L.BinOp(op, a, b)
        if isinstance(e, A.Index):
            v, i = self.term(e.vec), self.term(e.index)
            self.on_guard("OutOfBounds", L.in_bounds(v, i))
            return L.Idx(v, i)
        if isinstance(e, A.SetLiteral):
            return L.SetLit(tuple(self.term(x) for x in e.elems))
        if isinstance(e, A.Builtin):
            if e.name == "read":
                return self.on_read(e)
            a = self.term(e.args[0])
            if e.name == "len":
                return L.Len(a)
            if e.name == "card":
                return L.Card(a)
            self.on_guard("OutOfBounds", L.le(L.IntLit(0), a))
            return L.NewVec(a)
        if isinstance(e, A.Call):
            return self.on_call(e, [self(a) for a in e.args])
        raise TypeError(f"not a term: {e!r}")

    # -- formulas ---------------------------------------------------------

    def formula(self, e):
        if isinstance(e, A.BoolConst):
            return L.TRUE if e.value else L.FALSE
        if isinstance(e, (A.Name, A.Old, A.Result, A.Call)):
            return self.term(e)
        if isinstance(e, A.Unary):
            return L.Not(self.formula(e.arg))
        if isinstance(e, A.ForallE):
            self.bound.append(e.var)
            try:
                return L.Forall(e.var, self.formula(e.body))
            finally:
                self.bound.pop()
        if not isinstance(e, A.Binary):
            raise TypeError(f"not a formula: {e!r}")
        op = e.op
        if op in ("and", "or", "==>", "<==>"):
            a, b = self.formula(e.left), self.formula(e.right)
            return {"and": L.And, "or": L.Or, "==>": L.Imp, "<==>": L.iff}[op](a, b)
        if op in ("==", "!="):
            a, b = self(e.left), self(e.right)
            f = L.equal(a, b) if e.left.ty == A.BOOL else L.Atom("eq", a, b)
            return f if op == "==" else L.Not(f)
        a, b = self.term(e.left), self.term(e.right)
        if op == "<":
            return L.lt(a, b)
        if op == "<=":
            return L.le(a, b)
        if op == ">":
            return L.Not(L.le(a, b))
        if op == ">=":
            return L.Not(L.lt(a, b))
        if op == "in":
            return L.Atom("mem", a, b)
        if op == "subset":
            return L.Atom("subset", a, b)
        raise TypeError(f"not a formula: {e!r}")


def spec_formula(e, name_of=None):
    """Logic formula of an annotation (no guards, calls or reads)."""
    return ToLogic(name_of).formula(e)
