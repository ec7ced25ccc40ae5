"""Ground evaluation and the bounded-enumeration validity oracle.

Values: ``int`` for Int, ``bool`` for Bool, ``frozenset`` of ints for sets,
``tuple`` of ints for vectors.  Division and modulus are Euclidean: the
remainder is always non-negative.

Enumeration order (``enumerate_validity``): free variables sorted by name,
the last one varying fastest.  Int and quantifier ranges run ascending over
``[-bound, bound]``; booleans run False, True; sets by size, then
lexicographically over the sorted range; vectors by length, then
lexicographically.  The first falsifying state is returned.
"""

import itertools
from dataclasses import dataclass, field

from .syntax import (
    BOOL, INT, SET, VEC, And, Atom, BinOp, BVar, Card, FalseF, Forall, Idx,
    Imp, IntLit, Len, LogicError, NewVec, Not, Or, SetLit, TrueF, Upd, Var,
    free_vars,
)


class NonGround(LogicError):
    pass


class EvalError(LogicError):
    def __init__(self, kind):
        super().__init__(kind)
        self.kind = kind


class TooLarge(LogicError):
    pass


def ediv(a, b):
    if b == 0:
        raise EvalError("DivByZero")
    r = a % abs(b)
    return (a - r) // b


def emod(a, b):
    if b == 0:
        raise EvalError("DivByZero")
    return a % abs(b)


def _idx(v, i):
    if not 0 <= i < len(v):
        raise EvalError("IdxOutOfBounds")
    return v[i]


def _upd(v, i, e):
    if not 0 <= i < len(v):
        raise EvalError("IdxOutOfBounds")
    return v[:i] + (e,) + v[i + 1:]


def _newvec(n):
    if n < 0:
        raise EvalError("IdxOutOfBounds")
    return (0,) * n


_BIN = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": ediv,
    "mod": emod,
    "union": lambda a, b: a | b,
    "inter": lambda a, b: a & b,
    "diff": lambda a, b: a - b,
}

_ATOM = {
    "eq": lambda a, b: a == b,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "mem": lambda a, b: a in b,
    "subset": lambda a, b: a <= b,
}


def compile_node(node, qrange=None):
    """Compile to a closure over a mutable state dict.

    ``qrange`` is the iterable used for quantifiers; ``None`` rejects them.
    """
    c = lambda n: compile_node(n, qrange)  # noqa: E731
    if isinstance(node, IntLit):
        v = node.value
        return lambda s: v
    if isinstance(node, (Var, BVar)):
        name = node.name

        def look(s):
            try:
                return s[name]
            except KeyError:
                raise NonGround(f"unbound variable {name}") from None
        return look
    if isinstance(node, TrueF):
        return lambda s: True
    if isinstance(node, FalseF):
        return lambda s: False
    if isinstance(node, BinOp):
        fn, a, b = _BIN[node.op], c(node.left), c(node.right)
        return lambda s: fn(a(s), b(s))
    if isinstance(node, Atom):
        fn, a, b = _ATOM[node.op], c(node.left), c(node.right)
        return lambda s: fn(a(s), b(s))
    if isinstance(node, Len):
        a = c(node.arg)
        return lambda s: len(a(s))
    if isinstance(node, Card):
        a = c(node.arg)
        return lambda s: len(a(s))
    if isinstance(node, Idx):
        v, i = c(node.vec), c(node.index)
        return lambda s: _idx(v(s), i(s))
    if isinstance(node, Upd):
        v, i, e = c(node.vec), c(node.index), c(node.value)
        return lambda s: _upd(v(s), i(s), e(s))
    if isinstance(node, SetLit):
        parts = [c(e) for e in node.elems]
        return lambda s: frozenset(p(s) for p in parts)
    if isinstance(node, NewVec):
        n = c(node.length)
        return lambda s: _newvec(n(s))
    if isinstance(node, Not):
        a = c(node.arg)
        return lambda s: not a(s)
    if isinstance(node, And):
        a, b = c(node.left), c(node.right)
        return lambda s: a(s) and b(s)
    if isinstance(node, Or):
        a, b = c(node.left), c(node.right)
        return lambda s: a(s) or b(s)
    if isinstance(node, Imp):
        a, b = c(node.left), c(node.right)
        return lambda s: (not a(s)) or b(s)
    if isinstance(node, Forall):
        if qrange is None:
            raise NonGround("quantifier in ground evaluation")
        body = c(node.body)
        var = node.var
        values = tuple(qrange)

        def forall(s):
            missing = object()
            saved = s.get(var, missing)
            try:
                for x in values:
                    s[var] = x
                    if not body(s):
                        return False
                return True
            finally:
                if saved is missing:
                    del s[var]
                else:
                    s[var] = saved
        return forall
    raise LogicError(f"cannot evaluate {node!r}")


def eval_ground(f, state=None, qrange=None):
    """Evaluate ``f`` under ``state``.

    Raises ``NonGround`` for unbound variables or (without ``qrange``)
    quantifiers, and ``EvalError`` for partial operations out of domain.
    """
    return compile_node(f, qrange)(dict(state or {}))


def eval_term(t, state=None, qrange=None):
    return compile_node(t, qrange)(dict(state or {}))


@dataclass(frozen=True)
class Valid:
    states: int = 0
    undefined: int = 0

    def __bool__(self):
        return True


@dataclass(frozen=True)
class CounterModel:
    state: dict = field(hash=False)

    def __bool__(self):
        return False


DEFAULT_CEILING = 5_000_000


def domain(sort, bound, set_cap, vec_cap):
    vals = range(-bound, bound + 1)
    if sort == INT:
        return list(vals)
    if sort == BOOL:
        return [False, True]
    if sort == SET:
        out = []
        for k in range(0, min(set_cap, len(vals)) + 1):
            out.extend(frozenset(c) for c in itertools.combinations(vals, k))
        return out
    if sort == VEC:
        out = []
        for k in range(0, vec_cap + 1):
            out.extend(itertools.product(vals, repeat=k))
        return out
    raise LogicError(f"unknown sort {sort}")


def state_space_size(f, bound, set_cap, vec_cap):
    size = 1
    for sort in free_vars(f).values():
        size *= len(domain(sort, bound, set_cap, vec_cap))
    return size


def enumerate_validity(f, bound, set_cap=3, vec_cap=3, ceiling=DEFAULT_CEILING):
    """Exhaustively search small states for a counter-model of ``f``.

    States in which evaluation hits a partial operation outside its domain
    are counted as undefined rather than as counter-models.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    fv = free_vars(f)
    names = sorted(fv)
    domains = [domain(fv[n], bound, set_cap, vec_cap) for n in names]
    size = 1
    for d in domains:
        size *= len(d)
    if size > ceiling:
        raise TooLarge(f"{size} states exceed ceiling {ceiling}")
    check = compile_node(f, range(-bound, bound + 1))
    undefined = 0
    state = {}
    for combo in itertools.product(*domains):
        for n, v in zip(names, combo):
            state[n] = v
        try:
            ok = check(state)
        except EvalError:
            undefined += 1
            continue
        if not ok:
            return CounterModel(dict(state))
    return Valid(size, undefined)


def state_window(state, minimum=8):
    """Quantifier range for evaluating annotations in a concrete state.

    Covers every integer, element and index occurring in ``state`` with a
    margin, so guarded quantifiers over indices or members are exact.
    """
    r = minimum
    for v in state.values():
        if type(v) is int:
            r = max(r, abs(v))
        elif type(v) in (tuple, frozenset) and v:
            r = max(r, len(v), max(abs(x) for x in v))
    return range(-r - 1, r + 2)
