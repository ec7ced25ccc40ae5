"""Structural well-formedness of bytecode modules.

The loader runs an abstract interpretation over operand-stack *sorts*:
every reachable pc gets exactly one stack shape, all paths must agree,
loop heads carrying invariants must be reached with an empty stack, and
every annotation must mention only the variables it is allowed to see.
"""

import re

from ..logic.syntax import free_vars
from .asm import parse_lbc
from .binary import decode_module
from .isa import FUNC, LABEL, LIT, SIGNATURE, SLOT, SORTS, operand_kind
from .module import MalformedModule

MAX_STACK = 1024
MAX_SLOTS = 1 << 16
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_RESERVED = re.compile(r"q\d+\Z")


def load_module(src):
    """Parse (text or bytes) and check; returns the module or raises."""
    if isinstance(src, (bytes, bytearray, memoryview)):
        m = decode_module(bytes(src))
    else:
        m = parse_lbc(src)
    check_module(m)
    return m


def check_module(m):
    """Raise MalformedModule unless ``m`` is well formed; returns stack maps."""
    if not m.functions:
        raise MalformedModule("module has no functions")
    seen = set()
    for f in m.functions:
        if not _NAME.match(f.name) or f.name in seen:
            raise MalformedModule("bad or duplicate function name", f.name)
        seen.add(f.name)
    return {f.name: check_function(f, m) for f in m.functions}


def param_sorts(f):
    return tuple(f.table.sortmap[k] for k in range(f.nparams))


def check_function(f, m):
    where = f.name
    if not 0 <= f.nparams <= f.nslots <= MAX_SLOTS:
        raise MalformedModule("bad parameter or slot count", where)
    if f.ret is not None and f.ret not in SORTS:
        raise MalformedModule("bad return sort", where)
    t = f.table
    if set(t.varmap) != set(range(f.nslots)):
        raise MalformedModule("every slot needs exactly one #var entry", where)
    names = list(t.varmap.values())
    if len(set(names)) != len(names):
        raise MalformedModule("logical variable names must be distinct", where)
    for n in names:
        if not _NAME.match(n) or _RESERVED.match(n):
            raise MalformedModule(f"bad logical variable name {n!r}", where)
    if not f.code:
        raise MalformedModule("empty function body", where)
    for label, pc in f.labels.items():
        if not _NAME.match(label):
            raise MalformedModule(f"bad label {label!r}", where)
        if not 0 <= pc < len(f.code):
            raise MalformedModule(f"label {label} out of range", where)
    for pc, ins in enumerate(f.code):
        kind = operand_kind(ins.op)
        loc = f"{where}@{pc}"
        if kind == SLOT and not (isinstance(ins.arg, int) and 0 <= ins.arg < f.nslots):
            raise MalformedModule(f"slot {ins.arg} out of range", loc)
        if kind == LABEL and ins.arg not in f.labels:
            raise MalformedModule(f"undefined label {ins.arg}", loc)
        if kind == FUNC and m.function(ins.arg) is None:
            raise MalformedModule(f"undefined function {ins.arg}", loc)
        if kind == LIT and not isinstance(ins.arg, int):
            raise MalformedModule("bad literal", loc)
        if ins.op == "HALT" and f.ret is not None:
            raise MalformedModule("HALT in a value-returning function", loc)
    stacks = _stack_map(f, m)
    for pc in range(len(f.code)):
        if pc not in stacks:
            raise MalformedModule("unreachable instruction", f"{where}@{pc}")
    for label in t.invariants:
        if label not in f.labels:
            raise MalformedModule(f"invariant for undefined label {label}", where)
        if stacks[f.labels[label]]:
            raise MalformedModule(f"operand stack not empty at cut point {label}", where)
    for pc in t.asserts:
        if not (isinstance(pc, int) and 0 <= pc < len(f.code)):
            raise MalformedModule(f"assert at bad pc {pc}", where)
    _check_annotations(f)
    return stacks


def _stack_map(f, m):
    stacks = {0: ()}
    work = [0]
    while work:
        pc = work.pop()
        st = stacks[pc]
        ins = f.code[pc]
        loc = f"{f.name}@{pc}"
        succ, out = _step(f, m, ins, st, pc, loc)
        for nxt in succ:
            if nxt >= len(f.code):
                raise MalformedModule("control falls off the end of the function", loc)
            if nxt in stacks:
                if stacks[nxt] != out:
                    raise MalformedModule(f"stack shape mismatch at pc {nxt}", loc)
            else:
                stacks[nxt] = out
                work.append(nxt)
    return stacks


def _pop(st, want, loc):
    if len(st) < len(want):
        raise MalformedModule("stack underflow", loc)
    top = st[len(st) - len(want):]
    if tuple(top) != tuple(want):
        raise MalformedModule(f"operand sort mismatch: need {list(want)}, have {list(top)}", loc)
    return st[:len(st) - len(want)]


def _push(st, s, loc):
    if len(st) >= MAX_STACK:
        raise MalformedModule("operand stack overflow", loc)
    return st + (s,)


def _step(f, m, ins, st, pc, loc):
    op = ins.op
    nxt = pc + 1
    if op == "PUSH":
        return [nxt], _push(st, "bool" if isinstance(ins.arg, bool) else "int", loc)
    if op == "LOAD":
        return [nxt], _push(st, f.table.sortmap[ins.arg], loc)
    if op == "STORE":
        return [nxt], _pop(st, (f.table.sortmap[ins.arg],), loc)
    if op == "CALL":
        g = m.function(ins.arg)
        rest = _pop(st, param_sorts(g), loc)
        return [nxt], rest if g.ret is None else _push(rest, g.ret, loc)
    if op == "RET":
        want = () if f.ret is None else (f.ret,)
        if st != want:
            raise MalformedModule(f"RET needs stack {list(want)}, have {list(st)}", loc)
        return [], ()
    ins_sorts, out = SIGNATURE[op]
    rest = _pop(st, ins_sorts, loc)
    if out is not None:
        rest = _push(rest, out, loc)
    if op == "HALT":
        return [], ()
    if op == "JMP":
        return [f.labels[ins.arg]], rest
    if op == "JZ":
        return [nxt, f.labels[ins.arg]], rest
    return [nxt], rest


def _check_annotations(f):
    t = f.table
    env = {t.varmap[k]: t.sortmap[k] for k in t.varmap}
    params = {t.varmap[k]: t.sortmap[k] for k in range(f.nparams)}
    post = dict(params)
    post.update({"\\old_" + n: s for n, s in params.items()})
    if f.ret is not None:
        post["\\result"] = f.ret
    _scope(t.requires, params, f"{f.name} requires")
    _scope(t.ensures, post, f"{f.name} ensures")
    for label, inv in t.invariants.items():
        _scope(inv, env, f"{f.name} invariant {label}")
    for pc, a in t.asserts.items():
        _scope(a, env, f"{f.name} assert {pc}")


def _scope(formula, allowed, where):
    for name, sort in free_vars(formula).items():
        if allowed.get(name) != sort:
            raise MalformedModule(f"variable {name} ({sort}) not allowed here", where)
