"""Terms and formulas of the assertion logic.

All nodes are immutable dataclasses and compare structurally.  Boolean
program variables live on the formula side as ``BVar``; every other
variable is a ``Var`` carrying its sort.
"""

from dataclasses import dataclass

__all__ = [
    'ARITH_OPS', 'ATOM_OPS', 'And', 'Atom', 'BOOL', 'BVar', 'BinOp', 'Card', 'FALSE',
    'FalseF', 'Forall', 'Formula', 'INT', 'Idx', 'Imp', 'IntLit', 'Len', 'LogicError',
    'NewVec', 'Not', 'Or', 'SET', 'SET_OPS', 'SORTS', 'SetLit', 'SortMismatch', 'TRUE',
    'Term', 'TrueF', 'Upd', 'VEC', 'Var', 'add', 'all_names', 'children', 'conj', 'disj',
    'eq', 'equal', 'free_vars', 'fresh_name', 'iff', 'in_bounds', 'is_quantifier_free',
    'le', 'lt', 'make_var', 'mul', 'rebuild', 'sort_of', 'sub', 'subst_map', 'substitute',
    'subterms',
]

INT = "int"
BOOL = "bool"
SET = "set"
VEC = "vec"
SORTS = (INT, BOOL, SET, VEC)

ARITH_OPS = ("add", "sub", "mul", "div", "mod")
SET_OPS = ("union", "inter", "diff")
ATOM_OPS = ("eq", "lt", "le", "mem", "subset")


class LogicError(Exception):
    pass


class SortMismatch(LogicError):
    pass


class Term:
    __slots__ = ()


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: str = INT


@dataclass(frozen=True)
class BinOp(Term):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Len(Term):
    arg: Term


@dataclass(frozen=True)
class Card(Term):
    arg: Term


@dataclass(frozen=True)
class Idx(Term):
    vec: Term
    index: Term


@dataclass(frozen=True)
class Upd(Term):
    vec: Term
    index: Term
    value: Term


@dataclass(frozen=True)
class SetLit(Term):
    elems: tuple = ()


@dataclass(frozen=True)
class NewVec(Term):
    length: Term


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class BVar(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = TrueF()
FALSE = FalseF()


def sort_of(t):
    """Sort of a term; formulas count as ``bool``."""
    if isinstance(t, Formula):
        return BOOL
    if isinstance(t, IntLit):
        return INT
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, BinOp):
        return SET if t.op in SET_OPS else INT
    if isinstance(t, (Len, Card, Idx)):
        return INT
    if isinstance(t, (Upd, NewVec)):
        return VEC
    if isinstance(t, SetLit):
        return SET
    raise LogicError(f"not a term: {t!r}")


# -- constructors -----------------------------------------------------------

def add(a, b):
    return BinOp("add", a, b)


def sub(a, b):
    return BinOp("sub", a, b)


def mul(a, b):
    return BinOp("mul", a, b)


def eq(a, b):
    return Atom("eq", a, b)


def lt(a, b):
    return Atom("lt", a, b)


def le(a, b):
    return Atom("le", a, b)


def iff(a, b):
    return And(Imp(a, b), Imp(b, a))


def equal(a, b):
    """Equality at any sort; booleans become a bi-implication."""
    if isinstance(a, Formula) or isinstance(b, Formula):
        return iff(a, b)
    return eq(a, b)


def conj(parts):
    """Right-nested conjunction; ``TRUE`` for the empty list."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def in_bounds(vec, index):
    return And(le(IntLit(0), index), lt(index, Len(vec)))


def make_var(name, sort):
    """Logical variable for a program slot of the given sort."""
    return BVar(name) if sort == BOOL else Var(name, sort)


# -- traversal --------------------------------------------------------------

def children(node):
    if isinstance(node, (IntLit, Var, TrueF, FalseF, BVar)):
        return ()
    if isinstance(node, (BinOp, Atom, And, Or, Imp)):
        return (node.left, node.right)
    if isinstance(node, (Len, Card, Not)):
        return (node.arg,)
    if isinstance(node, Idx):
        return (node.vec, node.index)
    if isinstance(node, Upd):
        return (node.vec, node.index, node.value)
    if isinstance(node, SetLit):
        return node.elems
    if isinstance(node, NewVec):
        return (node.length,)
    if isinstance(node, Forall):
        return (node.body,)
    raise LogicError(f"unknown node {node!r}")


def rebuild(node, kids):
    """Same node kind with new children (binders keep their variable)."""
    if isinstance(node, (BinOp, Atom)):
        return type(node)(node.op, kids[0], kids[1])
    if isinstance(node, (And, Or, Imp)):
        return type(node)(kids[0], kids[1])
    if isinstance(node, (Len, Card, Not, NewVec)):
        return type(node)(kids[0])
    if isinstance(node, Idx):
        return Idx(kids[0], kids[1])
    if isinstance(node, Upd):
        return Upd(kids[0], kids[1], kids[2])
    if isinstance(node, SetLit):
        return SetLit(tuple(kids))
    if isinstance(node, Forall):
        return Forall(node.var, kids[0])
    return node


def free_vars(node, bound=frozenset()):
    """Map of free variable name -> sort."""
    out = {}
    _free(node, bound, out)
    return out


def _free(node, bound, out):
    if isinstance(node, Var):
        if node.name not in bound:
            out[node.name] = node.sort
        return
    if isinstance(node, BVar):
        if node.name not in bound:
            out[node.name] = BOOL
        return
    if isinstance(node, Forall):
        _free(node.body, bound | {node.var}, out)
        return
    for k in children(node):
        _free(k, bound, out)


def all_names(node):
    """Every variable name occurring in ``node``, free or bound."""
    out = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (Var, BVar)):
            out.add(n.name)
        elif isinstance(n, Forall):
            out.add(n.var)
        stack.extend(children(n))
    return out


def is_quantifier_free(node):
    if isinstance(node, Forall):
        return False
    return all(is_quantifier_free(k) for k in children(node))


def subterms(node):
    """Preorder iterator over all subterms and subformulas."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


# -- substitution -----------------------------------------------------------

def fresh_name(base, avoid):
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def _check_sort(name, sort, repl):
    rs = sort_of(repl)
    if sort is not None and rs != sort:
        raise SortMismatch(f"cannot substitute {rs} for {name}: {sort}")


def substitute(f, var, t):
    """Capture-avoiding replacement of free ``var`` by ``t`` in ``f``.

    ``t`` is a formula when ``var`` names a boolean variable.
    """
    return subst_map(f, {var: t})


def subst_map(f, mapping):
    """Simultaneous capture-avoiding substitution."""
    if not mapping:
        return f
    fv = free_vars(f)
    mapping = {k: v for k, v in mapping.items() if k in fv}
    if not mapping:
        return f
    for k, v in mapping.items():
        _check_sort(k, fv[k], v)
    repl_free = set()
    for v in mapping.values():
        repl_free.update(free_vars(v))
    return _subst(f, mapping, repl_free)


def _subst(node, mapping, repl_free):
    if isinstance(node, (Var, BVar)):
        return mapping.get(node.name, node)
    if isinstance(node, (IntLit, TrueF, FalseF)):
        return node
    if isinstance(node, Forall):
        inner = {k: v for k, v in mapping.items() if k != node.var}
        if not inner:
            return node
        body_free = free_vars(node.body)
        inner = {k: v for k, v in inner.items() if k in body_free}
        if not inner:
            return node
        var = node.var
        body = node.body
        if var in repl_free:
            avoid = all_names(body) | repl_free | set(inner)
            new = fresh_name(var, avoid)
            body = _subst(body, {var: Var(new, INT)}, {new})
            var = new
        return Forall(var, _subst(body, inner, repl_free))
    kids = children(node)
    new_kids = [_subst(k, mapping, repl_free) for k in kids]
    if all(a is b for a, b in zip(kids, new_kids)):
        return node
    return rebuild(node, new_kids)
