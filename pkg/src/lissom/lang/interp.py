"""Reference big-step interpreter, used as the oracle for compiled code.

It shares Euclidean division, eager ``and``/``or`` and the trap kinds
with the virtual machine.  ``assert`` statements are evaluated here (the
machine does not check them) and fail with ``AssertFailed``.
"""

from dataclasses import dataclass

from ..logic.semantics import EvalError, NonGround, ediv, emod, eval_ground, state_window
from . import ast as A
from .tologic import spec_formula

DEFAULT_FUEL = 1_000_000
MAX_VEC = 1_000_000


@dataclass(frozen=True)
class SrcOutcome:
    outputs: tuple
    result: object = None
    store: tuple = ()          # final (name, value) pairs of the entry function


@dataclass(frozen=True)
class SrcTrap:
    kind: str
    function: str
    line: int
    outputs: tuple = ()


@dataclass(frozen=True)
class SrcOutOfFuel:
    outputs: tuple = ()


class _Trap(Exception):
    def __init__(self, kind, node):
        super().__init__(kind)
        self.kind = kind
        self.node = node


class _Return(Exception):
    def __init__(self, value):
        super().__init__()
        self.value = value


class _Fuel(Exception):
    pass


def interpret_source(tp, inputs=(), fuel=DEFAULT_FUEL, entry="main", args=()):
    it = _Interp(tp, inputs, fuel)
    fn = tp.program.function(entry)
    try:
        result, env = it.call(fn, list(args))
    except _Trap as t:
        return SrcTrap(t.kind, it.where[-1], t.node.pos[0] if t.node is not None else 0, tuple(it.outputs))
    except _Fuel:
        return SrcOutOfFuel(tuple(it.outputs))
    return SrcOutcome(tuple(it.outputs), result, tuple(sorted(env.items())))


class _Interp:
    def __init__(self, tp, inputs, fuel):
        self.tp = tp
        self.inputs = list(inputs)
        self.outputs = []
        self.fuel = fuel
        self.where = []

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise _Fuel()

    def call(self, fn, args):
        self.where.append(fn.name)
        env = {p.name: a for p, a in zip(fn.params, args)}
        try:
            self.block(fn.body, env)
            result = None
        except _Return as r:
            result = r.value
        self.where.pop()
        return result, env

    def block(self, body, env):
        for s in body:
            self.stmt(s, env)

    def stmt(self, s, env):
        self.tick()
        if isinstance(s, A.VarDecl):
            env[s.name] = self.eval(s.init, env)
        elif isinstance(s, A.Assign):
            env[s.name] = self.eval(s.value, env)
        elif isinstance(s, A.VecStore):
            i = self.eval(s.index, env)
            e = self.eval(s.value, env)
            v = env[s.name]
            if not 0 <= i < len(v):
                raise _Trap("OutOfBounds", s)
            env[s.name] = v[:i] + (e,) + v[i + 1:]
        elif isinstance(s, A.If):
            self.block(s.then if self.eval(s.cond, env) else s.els, env)
        elif isinstance(s, A.While):
            while self.eval(s.cond, env):
                self.tick()
                self.block(s.body, env)
        elif isinstance(s, A.Assert):
            if not self.holds(s.formula, env):
                raise _Trap("AssertFailed", s)
        elif isinstance(s, A.Return):
            raise _Return(None if s.value is None else self.eval(s.value, env))
        elif isinstance(s, A.Print):
            self.outputs.append(self.eval(s.value, env))
        else:
            raise AssertionError(s)

    def holds(self, formula, env):
        try:
            return eval_ground(spec_formula(formula), env, state_window(env)) is True
        except (EvalError, NonGround):
            return False

    def eval(self, e, env):
        if isinstance(e, (A.IntConst, A.BoolConst)):
            return e.value
        if isinstance(e, A.Name):
            return env[e.id]
        if isinstance(e, A.Unary):
            v = self.eval(e.arg, env)
            return -v if e.op == "neg" else not v
        if isinstance(e, A.Binary):
            a = self.eval(e.left, env)
            b = self.eval(e.right, env)
            return self.binop(e, a, b)
        if isinstance(e, A.Index):
            v = self.eval(e.vec, env)
            i = self.eval(e.index, env)
            if not 0 <= i < len(v):
                raise _Trap("OutOfBounds", e)
            return v[i]
        if isinstance(e, A.SetLiteral):
            return frozenset(self.eval(x, env) for x in e.elems)
        if isinstance(e, A.Builtin):
            if e.name == "read":
                if not self.inputs:
                    raise _Trap("InputExhausted", e)
                return self.inputs.pop(0)
            a = self.eval(e.args[0], env)
            if e.name == "newvec":
                if a < 0:
                    raise _Trap("OutOfBounds", e)
                if a > MAX_VEC:
                    raise _Trap("ResourceLimit", e)
                return (0,) * a
            return len(a)
        if isinstance(e, A.Call):
            args = [self.eval(a, env) for a in e.args]
            result, _ = self.call(self.tp.program.function(e.func), args)
            return result
        raise AssertionError(e)

    def binop(self, e, a, b):
        op = e.op
        if op in ("div", "mod"):
            if b == 0:
                raise _Trap("DivByZero", e)
            return ediv(a, b) if op == "div" else emod(a, b)
        return {
            "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
            "union": lambda: a | b, "inter": lambda: a & b, "diff": lambda: a - b,
            "and": lambda: a and b, "or": lambda: a or b,
            "==": lambda: a == b, "!=": lambda: a != b,
            "<": lambda: a < b, "<=": lambda: a <= b, ">": lambda: a > b, ">=": lambda: a >= b,
            "in": lambda: a in b,
        }[op]()
