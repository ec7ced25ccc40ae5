"""Verification conditions for annotated bytecode.

Cut points are the function entry, the exit, and every label carrying an
invariant.  Every CFG cycle must pass through an annotated label (the
coverage condition); otherwise the module is rejected with
``UncoveredCycle``.  Each segment is executed symbolically over a stack of
logic terms, producing the same VC tree shape as the source generator, and
obligations are read off with the shared functions in ``core``.

Obligation order: functions in module order; the entry segment first, then
loop-head segments in pc order.
"""

from functools import lru_cache

from ..logic.syntax import (
    BOOL, FALSE, INT, SET, TRUE, VEC, And, Atom, BinOp, Card, Formula, Idx, IntLit, Len,
    NewVec, Not, Or, SetLit, Term, Upd, conj, free_vars, in_bounds, le, lt, make_var,
    sort_of, subst_map,
)
from ..vm.loader import check_module
from . import core as C
from .obligation import BYTECODE, SymbolicStackMismatch, UncoveredCycle

POST_TAG = ("post",)

_BIN = {"ADD": "add", "SUB": "sub", "MUL": "mul", "DIV": "div", "MOD": "mod",
        "SUNION": "union", "SINTER": "inter", "SDIFF": "diff"}


def successors(code, labels, pc):
    ins = code[pc]
    if ins.op == "JMP":
        return [labels[ins.arg]]
    if ins.op == "JZ":
        return [pc + 1, labels[ins.arg]]
    if ins.op in ("RET", "HALT"):
        return []
    return [pc + 1]


def check_coverage(fn):
    """Raise UncoveredCycle unless every cycle meets an annotated label."""
    cut = {fn.labels[l] for l in fn.table.invariants}
    code, labels = fn.code, fn.labels
    color = {}
    for root in [0] + sorted(cut):
        if root >= len(code) or color.get(root):
            continue
        stack = [(root, iter(successors(code, labels, root)))]
        path = [root]
        color[root] = 1
        while stack:
            pc, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[pc] = 2
                continue
            if nxt in cut or nxt >= len(code):
                continue
            c = color.get(nxt)
            if c == 1:
                raise UncoveredCycle(fn.name, path[path.index(nxt):] + [nxt])
            if c is None:
                color[nxt] = 1
                stack.append((nxt, iter(successors(code, labels, nxt))))
                path.append(nxt)


class _FunctionVC:
    def __init__(self, module, fn):
        self.module = module
        self.fn = fn
        t = fn.table
        self.names = {k: t.varmap[k] for k in range(fn.nslots)}
        self.sorts = {k: t.sortmap[k] for k in range(fn.nslots)}
        self.inv_at = {}
        for label in sorted(t.invariants):
            self.inv_at.setdefault(fn.labels[label], []).append(label)
        self.calls, self.reads = {}, {}
        for pc, ins in enumerate(fn.code):
            if ins.op == "CALL":
                self.calls[pc] = len(self.calls)
            elif ins.op == "READ":
                self.reads[pc] = len(self.reads)
        self.seg = lru_cache(maxsize=None)(self._seg)

    def invariant(self, pc):
        return conj([self.fn.table.invariants[l] for l in self.inv_at[pc]])

    def var(self, slot):
        return make_var(self.names[slot], self.sorts[slot])

    def fail(self, pc, reason):
        raise SymbolicStackMismatch(self.fn.name, pc, reason)

    def arrive(self, pc, stack):
        """Tree for control arriving at ``pc`` (asserts and cut points apply)."""
        if pc >= len(self.fn.code):
            self.fail(pc, "control falls off the end of the code")
        tree_of = None
        if pc in self.inv_at:
            if stack:
                self.fail(pc, "non-empty stack at an annotated label")
            tree_of = C.Goal(self.invariant(pc), ("inv", pc))
        else:
            tree_of = self.seg(pc, stack, False)
        a = self.fn.table.asserts.get(pc)
        if a is not None:
            return C.Check(C.ASSERT, a, pc, tree_of)
        return tree_of

    def pop(self, pc, stack, sorts):
        n = len(sorts)
        if len(stack) < n:
            self.fail(pc, "stack underflow")
        args = stack[len(stack) - n:]
        for a, s in zip(args, sorts):
            if _sort(a) != s:
                self.fail(pc, f"expected {s} on the stack")
        return stack[:len(stack) - n], args

    def _seg(self, pc, stack, split):
        fn = self.fn
        ins = fn.code[pc]
        op, arg = ins.op, ins.arg
        if op == "PUSH":
            if isinstance(arg, bool):
                return self.seg_next(pc, stack + (TRUE if arg else FALSE,), split)
            return self.seg_next(pc, stack + (IntLit(arg),), split)
        if op == "LOAD":
            return self.seg_next(pc, stack + (self.var(arg),), split)
        if op == "STORE":
            rest, (t,) = self.pop(pc, stack, (self.sorts[arg],))
            name = self.names[arg]
            if any(name in free_vars(x) for x in rest):
                self.fail(pc, "stored slot is still referenced on the stack")
            return C.subst(self.seg_next(pc, rest, split), {name: t})
        if op in _BIN:
            srt = (INT, INT) if op in ("ADD", "SUB", "MUL", "DIV", "MOD") else (SET, SET)
            rest, (a, b) = self.pop(pc, stack, srt)
            body = self.seg_next(pc, rest + (BinOp(_BIN[op], a, b),), split)
            if op in ("DIV", "MOD") and not (isinstance(b, IntLit) and b.value != 0):
                return C.Check(C.safety("DivByZero"), Not(Atom("eq", b, IntLit(0))), pc, body)
            return body
        if op in ("EQ", "LT", "LE"):
            rest, (a, b) = self.pop(pc, stack, (INT, INT))
            f = {"EQ": lambda: Atom("eq", a, b), "LT": lambda: lt(a, b), "LE": lambda: le(a, b)}[op]()
            return self.seg_next(pc, rest + (f,), split)
        if op == "NOT":
            rest, (a,) = self.pop(pc, stack, (BOOL,))
            return self.seg_next(pc, rest + (Not(a),), split)
        if op in ("AND", "OR"):
            rest, (a, b) = self.pop(pc, stack, (BOOL, BOOL))
            return self.seg_next(pc, rest + ((And if op == "AND" else Or)(a, b),), split)
        if op == "NEWVEC":
            rest, (n,) = self.pop(pc, stack, (INT,))
            body = self.seg_next(pc, rest + (NewVec(n),), split)
            return C.Check(C.safety("OutOfBounds"), le(IntLit(0), n), pc, body)
        if op == "GETIDX":
            rest, (v, i) = self.pop(pc, stack, (VEC, INT))
            body = self.seg_next(pc, rest + (Idx(v, i),), split)
            return C.Check(C.safety("OutOfBounds"), in_bounds(v, i), pc, body)
        if op == "SETIDX":
            rest, (v, i, e) = self.pop(pc, stack, (VEC, INT, INT))
            body = self.seg_next(pc, rest + (Upd(v, i, e),), split)
            return C.Check(C.safety("OutOfBounds"), in_bounds(v, i), pc, body)
        if op == "VLEN":
            rest, (v,) = self.pop(pc, stack, (VEC,))
            return self.seg_next(pc, rest + (Len(v),), split)
        if op == "NEWSET":
            return self.seg_next(pc, stack + (SetLit(()),), split)
        if op == "SINS":
            rest, (s, x) = self.pop(pc, stack, (SET, INT))
            if isinstance(s, SetLit):
                t = SetLit(s.elems + (x,))
            else:
                t = BinOp("union", s, SetLit((x,)))
            return self.seg_next(pc, rest + (t,), split)
        if op == "SMEM":
            rest, (x, s) = self.pop(pc, stack, (INT, SET))
            return self.seg_next(pc, rest + (Atom("mem", x, s),), split)
        if op == "SCARD":
            rest, (s,) = self.pop(pc, stack, (SET,))
            return self.seg_next(pc, rest + (Card(s),), split)
        if op == "READ":
            r = make_var(C.read_name(self.reads[pc]), INT)
            return self.seg_next(pc, stack + (r,), split)
        if op == "PRINT":
            rest, _ = self.pop(pc, stack, (INT,))
            return self.seg_next(pc, rest, split)
        if op == "CALL":
            return self.call(pc, stack, split)
        if op == "JMP":
            return self.arrive(fn.labels[arg], stack) if not split else self.jump(fn.labels[arg], stack)
        if op == "JZ":
            rest, (c,) = self.pop(pc, stack, (BOOL,))
            target = fn.labels[arg]
            if split:
                return C.Split(c, self.arrive(pc + 1, rest), self.arrive(target, rest))
            return C.Both(C.Assume(c, self.arrive(pc + 1, rest)),
                          C.Assume(Not(c), self.arrive(target, rest)))
        if op == "RET":
            ens = fn.table.ensures
            if fn.ret is None:
                if stack:
                    self.fail(pc, "void return with a non-empty stack")
                return C.Goal(ens, POST_TAG)
            rest, (v,) = self.pop(pc, stack, (fn.ret,))
            if rest:
                self.fail(pc, "return leaves values on the stack")
            return C.Goal(subst_map(ens, {"\\result": v}), POST_TAG)
        if op == "HALT":
            return C.Goal(fn.table.ensures, POST_TAG)
        self.fail(pc, f"unknown opcode {op}")

    def seg_next(self, pc, stack, split):
        if split:
            nxt = pc + 1
            if nxt in self.inv_at or nxt in self.fn.table.asserts or nxt >= len(self.fn.code):
                return self.arrive(nxt, stack)
            return self.seg(nxt, stack, True)
        return self.arrive(pc + 1, stack)

    def jump(self, target, stack):
        if target in self.inv_at or target in self.fn.table.asserts:
            return self.arrive(target, stack)
        return self.seg(target, stack, True)

    def call(self, pc, stack, split):
        callee = self.module.function(self.fn.code[pc].arg)
        t = callee.table
        params = [(t.varmap[k], t.sortmap[k]) for k in range(callee.nparams)]
        rest, args = self.pop(pc, stack, tuple(s for _, s in params))
        assigned = {ins.arg for ins in callee.code
                    if ins.op == "STORE" and ins.arg < callee.nparams}
        pre, post, result = C.callee_contract(t.requires, t.ensures, params, assigned,
                                              list(args), self.calls[pc], callee.ret)
        body = self.seg_next(pc, rest + (result,), split)
        return C.Check(C.PRE, pre, pc, C.Assume(post, body))

    def obligations(self):
        fn = self.fn
        t = fn.table
        params = [(self.names[k], self.sorts[k]) for k in range(fn.nparams)]
        hyp = C.entry_hypothesis(t.requires, params, free_vars(t.ensures))
        fmt = "pc {}".format
        out = C.segment_obligations(BYTECODE, fn.name, hyp, self.arrive(0, ()), None, 0, fmt)
        for pc in sorted(self.inv_at):
            tree = self.seg(pc, (), True)
            out += C.segment_obligations(BYTECODE, fn.name, self.invariant(pc), tree, pc, pc, fmt)
        return out


def _sort(x):
    if isinstance(x, Formula):
        return BOOL
    if isinstance(x, Term):
        return sort_of(x)
    return None


def generate_bytecode_obligations(module, checked=False):
    """All obligations of a loaded module, after the coverage check."""
    if not checked:
        check_module(module)
    out = []
    for fn in module.functions:
        check_coverage(fn)
    for fn in module.functions:
        out += _FunctionVC(module, fn).obligations()
    return out
