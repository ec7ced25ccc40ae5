"""Abstract syntax of LISS programs and annotations.

Nodes compare structurally; source positions and inferred types are
carried along but ignored by equality.
"""

from dataclasses import dataclass, field

INT, BOOL, SET, VEC = "int", "bool", "set", "vec"
TYPES = (INT, BOOL, SET, VEC)


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


def _ty():
    return field(default=None, compare=False, repr=False)


class Expr:
    pass


class Stmt:
    pass


@dataclass(eq=True)
class IntConst(Expr):
    value: int
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class BoolConst(Expr):
    value: bool
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Name(Expr):
    id: str
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Old(Expr):
    id: str
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Result(Expr):
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Unary(Expr):
    op: str            # "neg" | "not"
    arg: Expr
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Index(Expr):
    vec: Expr
    index: Expr
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class SetLiteral(Expr):
    elems: tuple
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Call(Expr):
    func: str
    args: tuple
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class Builtin(Expr):
    name: str          # "len" | "card" | "newvec" | "read"
    args: tuple
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class ForallE(Expr):
    var: str
    body: Expr
    pos: tuple = _pos()
    ty: str = _ty()


@dataclass(eq=True)
class VarDecl(Stmt):
    name: str
    type: str
    init: Expr
    pos: tuple = _pos()


@dataclass(eq=True)
class Assign(Stmt):
    name: str
    value: Expr
    pos: tuple = _pos()


@dataclass(eq=True)
class VecStore(Stmt):
    name: str
    index: Expr
    value: Expr
    pos: tuple = _pos()


@dataclass(eq=True)
class If(Stmt):
    cond: Expr
    then: tuple
    els: tuple
    pos: tuple = _pos()


@dataclass(eq=True)
class While(Stmt):
    cond: Expr
    invariant: Expr
    body: tuple
    pos: tuple = _pos()


@dataclass(eq=True)
class Assert(Stmt):
    formula: Expr
    pos: tuple = _pos()


@dataclass(eq=True)
class Return(Stmt):
    value: Expr = None
    pos: tuple = _pos()


@dataclass(eq=True)
class Print(Stmt):
    value: Expr
    pos: tuple = _pos()


@dataclass(eq=True)
class Param:
    name: str
    type: str
    pos: tuple = _pos()


@dataclass(eq=True)
class FunDecl:
    name: str
    params: tuple
    ret: str            # None for void
    requires: tuple
    ensures: tuple
    body: tuple
    pos: tuple = _pos()


@dataclass(eq=True)
class Program:
    functions: tuple

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None


ARITH = ("+", "-", "*", "div", "mod")
SETOPS = ("union", "inter", "diff")
COMPARE = ("==", "!=", "<", "<=", ">", ">=")


def walk_stmts(body):
    """Statements of ``body`` in source order, nested ones included."""
    for s in body:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.els)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)
