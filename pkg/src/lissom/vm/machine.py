"""Deterministic small-step interpreter.

Values are tagged by their Python type: ``int``, ``bool``, ``frozenset``
(sets) and ``tuple`` (vectors).  Sets and vectors have value semantics.
Runtime faults become ``Trap`` values; a malformed module that slipped past
the loader produces ``Trap("TypeTag")`` rather than a host exception.

With ``spec_monitor=True`` the machine also evaluates annotations as it
goes (callee preconditions at CALL, postconditions at RET, assertions on
arrival), which the test suite uses to look for specification violations.
"""

from dataclasses import dataclass

from ..logic.semantics import EvalError, NonGround, ediv, emod, eval_ground, state_window

DEFAULT_FUEL = 1_000_000
MAX_CALL_DEPTH = 4096
MAX_VEC = 1_000_000

_TYPE = {"int": int, "bool": bool, "set": frozenset, "vec": tuple}
_ZERO = {"int": 0, "bool": False, "set": frozenset(), "vec": ()}


@dataclass(frozen=True)
class Outcome:
    outputs: tuple
    result: object = None
    steps: int = 0


@dataclass(frozen=True)
class Trap:
    kind: str
    function: str
    pc: int
    outputs: tuple = ()


@dataclass(frozen=True)
class OutOfFuel:
    outputs: tuple = ()
    steps: int = 0


class _Fault(Exception):
    def __init__(self, kind):
        super().__init__(kind)
        self.kind = kind


def _tag(v, t):
    if type(v) is not t:
        raise _Fault("TypeTag")
    return v


class _Frame:
    __slots__ = ("fn", "pc", "stack", "slots", "old")

    def __init__(self, fn, args):
        self.fn = fn
        self.pc = 0
        self.stack = []
        self.slots = list(args) + [_ZERO[fn.table.sortmap[k]] for k in range(len(args), fn.nslots)]
        self.old = {"\\old_" + fn.table.varmap[k]: v for k, v in enumerate(args)}


def run(module, entry="main", inputs=(), fuel=DEFAULT_FUEL, args=(), spec_monitor=False):
    """Execute ``entry``; returns Outcome, Trap or OutOfFuel."""
    fn = module.function(entry)
    if fn is None:
        raise ValueError(f"no function named {entry!r}")
    if len(args) != fn.nparams:
        raise ValueError(f"{entry} expects {fn.nparams} arguments")
    outputs = []
    inputs = list(inputs)
    frames = [_Frame(fn, args)]
    if spec_monitor and not _holds(fn.table.requires, _env(frames[0])):
        return Trap("RequiresViolated", fn.name, 0, ())
    steps = 0
    while True:
        fr = frames[-1]
        if steps >= fuel:
            return OutOfFuel(tuple(outputs), steps)
        steps += 1
        pc = fr.pc
        try:
            done = _step(module, frames, fr, inputs, outputs, spec_monitor)
        except _Fault as e:
            return Trap(e.kind, fr.fn.name, pc, tuple(outputs))
        except (TypeError, IndexError, KeyError, AttributeError, ValueError):
            return Trap("TypeTag", fr.fn.name, pc, tuple(outputs))
        if done is not None:
            return Outcome(tuple(outputs), done[0], steps)


def _env(fr, result=None, with_result=False):
    t = fr.fn.table
    env = {t.varmap[k]: fr.slots[k] for k in range(fr.fn.nslots)}
    env.update(fr.old)
    if with_result:
        env["\\result"] = result
    return env


def _holds(f, env):
    try:
        return eval_ground(f, env, state_window(env)) is True
    except (EvalError, NonGround):
        return False


def _step(module, frames, fr, inputs, outputs, monitor):
    fn = fr.fn
    pc = fr.pc
    ins = fn.code[pc]
    op = ins.op
    st = fr.stack
    if monitor and pc in fn.table.asserts and not _holds(fn.table.asserts[pc], _env(fr)):
        raise _Fault("AssertViolated")
    fr.pc = pc + 1
    if op == "PUSH":
        st.append(ins.arg)
    elif op == "LOAD":
        st.append(fr.slots[ins.arg])
    elif op == "STORE":
        fr.slots[ins.arg] = _tag(st.pop(), _TYPE[fn.table.sortmap[ins.arg]])
    elif op in ("ADD", "SUB", "MUL", "DIV", "MOD", "EQ", "LT", "LE"):
        b = _tag(st.pop(), int)
        a = _tag(st.pop(), int)
        if op == "ADD":
            st.append(a + b)
        elif op == "SUB":
            st.append(a - b)
        elif op == "MUL":
            st.append(a * b)
        elif op in ("DIV", "MOD"):
            if b == 0:
                raise _Fault("DivByZero")
            st.append(ediv(a, b) if op == "DIV" else emod(a, b))
        elif op == "EQ":
            st.append(a == b)
        elif op == "LT":
            st.append(a < b)
        else:
            st.append(a <= b)
    elif op == "NOT":
        st.append(not _tag(st.pop(), bool))
    elif op in ("AND", "OR"):
        b = _tag(st.pop(), bool)
        a = _tag(st.pop(), bool)
        st.append((a and b) if op == "AND" else (a or b))
    elif op == "JMP":
        fr.pc = fn.labels[ins.arg]
    elif op == "JZ":
        if not _tag(st.pop(), bool):
            fr.pc = fn.labels[ins.arg]
    elif op == "NEWVEC":
        n = _tag(st.pop(), int)
        if n < 0:
            raise _Fault("OutOfBounds")
        if n > MAX_VEC:
            raise _Fault("ResourceLimit")
        st.append((0,) * n)
    elif op == "GETIDX":
        i = _tag(st.pop(), int)
        v = _tag(st.pop(), tuple)
        if not 0 <= i < len(v):
            raise _Fault("OutOfBounds")
        st.append(v[i])
    elif op == "SETIDX":
        e = _tag(st.pop(), int)
        i = _tag(st.pop(), int)
        v = _tag(st.pop(), tuple)
        if not 0 <= i < len(v):
            raise _Fault("OutOfBounds")
        st.append(v[:i] + (e,) + v[i + 1:])
    elif op == "VLEN":
        st.append(len(_tag(st.pop(), tuple)))
    elif op == "NEWSET":
        st.append(frozenset())
    elif op == "SINS":
        x = _tag(st.pop(), int)
        st.append(_tag(st.pop(), frozenset) | {x})
    elif op in ("SUNION", "SINTER", "SDIFF"):
        b = _tag(st.pop(), frozenset)
        a = _tag(st.pop(), frozenset)
        st.append(a | b if op == "SUNION" else a & b if op == "SINTER" else a - b)
    elif op == "SMEM":
        s = _tag(st.pop(), frozenset)
        st.append(_tag(st.pop(), int) in s)
    elif op == "SCARD":
        st.append(len(_tag(st.pop(), frozenset)))
    elif op == "READ":
        if not inputs:
            raise _Fault("InputExhausted")
        st.append(inputs.pop(0))
    elif op == "PRINT":
        outputs.append(_tag(st.pop(), int))
    elif op == "CALL":
        g = module.function(ins.arg)
        if len(frames) >= MAX_CALL_DEPTH:
            raise _Fault("CallDepth")
        args = st[len(st) - g.nparams:] if g.nparams else []
        del st[len(st) - g.nparams:]
        for k, a in enumerate(args):
            _tag(a, _TYPE[g.table.sortmap[k]])
        callee = _Frame(g, args)
        if monitor and not _holds(g.table.requires, _env(callee)):
            raise _Fault("RequiresViolated")
        frames.append(callee)
    elif op == "RET":
        value = st.pop() if fn.ret is not None else None
        if monitor and not _holds(fn.table.ensures, _env(fr, value, fn.ret is not None)):
            raise _Fault("EnsuresViolated")
        frames.pop()
        if not frames:
            return (value,)
        if fn.ret is not None:
            frames[-1].stack.append(value)
    elif op == "HALT":
        if monitor and not _holds(fn.table.ensures, _env(fr)):
            raise _Fault("EnsuresViolated")
        return (None,)
    else:
        raise _Fault("TypeTag")
    return None
