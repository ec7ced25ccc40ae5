"""Lowering of typed LISS programs to annotated bytecode.

Annotations are carried over by pure renaming: every source variable in
slot ``k`` becomes the logical name ``v{k}`` and ``\\old(x)`` becomes
``\\old_v{k}``.  No optimizations are performed; instruction order follows
source evaluation order exactly, which is what lets the bytecode
verification conditions coincide with the source ones.
"""

from dataclasses import dataclass, field

from .lang import ast as A
from .lang.tologic import SORT, spec_formula
from .logic.syntax import LogicError, conj, free_vars, make_var, subst_map
from .vm.isa import Instr
from .vm.module import AnnotationTable, BytecodeFunction, BytecodeModule


class UnmappedVariable(LogicError):
    def __init__(self, name):
        super().__init__(f"no bytecode name for variable {name}")
        self.name = name


class CompilerBug(Exception):
    pass


def slot_name(k):
    return f"v{k}"


class VarMap(dict):
    """Source logical name -> bytecode logical name for one function."""

    @classmethod
    def of(cls, info):
        vm = cls()
        for name, k in info.slots.items():
            vm[name] = slot_name(k)
        for p in info.params:
            vm["\\old_" + p] = "\\old_" + slot_name(info.slots[p])
        vm["\\result"] = "\\result"
        return vm


def translate_formula(f, vm):
    """Rename the free variables of ``f`` through ``vm``; nothing else changes.

    Names of call results and input reads (``$...``) are level-independent
    and pass through unchanged.
    """
    fv = free_vars(f)
    missing = sorted(n for n in fv if n not in vm)
    missing = [n for n in missing if not n.startswith("$")]
    if missing:
        raise UnmappedVariable(missing[0])
    return subst_map(f, {n: make_var(vm[n], s) for n, s in fv.items() if vm.get(n, n) != n})


@dataclass(frozen=True)
class TraceEntry:
    function: str
    kind: str
    line: int
    spans: tuple            # ((start, end), ...) half-open pc ranges


@dataclass
class LoweringTrace:
    entries: list = field(default_factory=list)
    loops: dict = field(default_factory=dict)   # (function, line, col) -> label

    def table(self):
        rows = ["function\tkind\tline\tpcs"]
        for e in self.entries:
            pcs = ",".join(f"{a}-{b - 1}" if b - a > 1 else str(a) for a, b in e.spans)
            rows.append(f"{e.function}\t{e.kind}\t{e.line}\t{pcs}")
        for (fn, line, col), label in self.loops.items():
            rows.append(f"{fn}\tloop-head\t{line}\t{label}")
        return "\n".join(rows) + "\n"


def returns(stmts):
    if not stmts:
        return False
    last = stmts[-1]
    if isinstance(last, A.Return):
        return True
    return isinstance(last, A.If) and returns(last.then) and returns(last.els)


def _ends_with_assert(stmts):
    return bool(stmts) and isinstance(stmts[-1], A.Assert)


_ARITH = {"+": "ADD", "-": "SUB", "*": "MUL", "div": "DIV", "mod": "MOD",
          "union": "SUNION", "inter": "SINTER", "diff": "SDIFF", "and": "AND", "or": "OR",
          "==": "EQ", "<": "LT", "<=": "LE", "in": "SMEM"}
_NEGATED = {"!=": "EQ", ">": "LE", ">=": "LT"}
_BUILTIN = {"read": "READ", "len": "VLEN", "card": "SCARD", "newvec": "NEWVEC"}


class _FunctionCompiler:
    def __init__(self, info, trace):
        self.info = info
        self.trace = trace
        self.vm = VarMap.of(info)
        self.code = []
        self.labels = {}
        self.invariants = {}
        self.asserts = {}
        self.nlabel = 0

    def emit(self, op, arg=None):
        self.code.append(Instr(op, arg))

    def label(self):
        name = f"L{self.nlabel}"
        self.nlabel += 1
        return name

    def place(self, label):
        self.labels[label] = len(self.code)

    def annotation(self, e):
        return translate_formula(spec_formula(e), self.vm)

    # -- expressions ------------------------------------------------------

    def expr(self, e):
        if isinstance(e, A.IntConst):
            self.emit("PUSH", e.value)
        elif isinstance(e, A.BoolConst):
            self.emit("PUSH", e.value)
        elif isinstance(e, A.Name):
            self.emit("LOAD", self.info.slots[e.id])
        elif isinstance(e, A.Unary):
            if e.op == "not":
                self.expr(e.arg)
                self.emit("NOT")
            elif isinstance(e.arg, A.IntConst):
                self.emit("PUSH", -e.arg.value)
            else:
                self.emit("PUSH", 0)
                self.expr(e.arg)
                self.emit("SUB")
        elif isinstance(e, A.Binary):
            self.expr(e.left)
            self.expr(e.right)
            if e.op in _NEGATED:
                self.emit(_NEGATED[e.op])
                self.emit("NOT")
            elif e.op in _ARITH:
                self.emit(_ARITH[e.op])
            else:
                raise CompilerBug(f"operator {e.op} in code")
        elif isinstance(e, A.Index):
            self.expr(e.vec)
            self.expr(e.index)
            self.emit("GETIDX")
        elif isinstance(e, A.SetLiteral):
            self.emit("NEWSET")
            for x in e.elems:
                self.expr(x)
                self.emit("SINS")
        elif isinstance(e, A.Call):
            for a in e.args:
                self.expr(a)
            self.emit("CALL", e.func)
        elif isinstance(e, A.Builtin):
            for a in e.args:
                self.expr(a)
            self.emit(_BUILTIN[e.name])
        else:
            raise CompilerBug(f"cannot lower {type(e).__name__}")

    # -- statements -------------------------------------------------------

    def block(self, stmts):
        k = 0
        while k < len(stmts):
            s = stmts[k]
            if isinstance(s, A.Assert):
                # a run of asserts shares one pc: record their conjunction
                run = []
                while k < len(stmts) and isinstance(stmts[k], A.Assert):
                    run.append(stmts[k])
                    k += 1
                pc = len(self.code)
                self.asserts[pc] = conj([self.annotation(a.formula) for a in run])
                for a in run:
                    self.record(a, [])
                continue
            self.stmt(s)
            k += 1

    def record(self, s, spans):
        line = s.pos[0] if s.pos else 0
        self.trace.entries.append(TraceEntry(self.info.name, type(s).__name__, line,
                                             tuple((a, b) for a, b in spans if b > a)))

    def stmt(self, s):
        start = len(self.code)
        if isinstance(s, (A.VarDecl, A.Assign)):
            self.expr(s.init if isinstance(s, A.VarDecl) else s.value)
            self.emit("STORE", self.info.slots[s.name])
            self.record(s, [(start, len(self.code))])
        elif isinstance(s, A.VecStore):
            slot = self.info.slots[s.name]
            self.emit("LOAD", slot)
            self.expr(s.index)
            self.expr(s.value)
            self.emit("SETIDX")
            self.emit("STORE", slot)
            self.record(s, [(start, len(self.code))])
        elif isinstance(s, A.Print):
            self.expr(s.value)
            self.emit("PRINT")
            self.record(s, [(start, len(self.code))])
        elif isinstance(s, A.Return):
            if s.value is not None:
                self.expr(s.value)
            self.emit("RET")
            self.record(s, [(start, len(self.code))])
        elif isinstance(s, A.If):
            self.if_stmt(s, start)
        elif isinstance(s, A.While):
            self.while_stmt(s, start)
        else:
            raise CompilerBug(f"cannot lower {type(s).__name__}")

    def if_stmt(self, s, start):
        self.expr(s.cond)
        l_else = self.label()
        self.emit("JZ", l_else)
        spans = [(start, len(self.code))]
        self.block(s.then)
        l_end = None
        # a branch ending in an assert jumps explicitly, so that its assert pc
        # is not shared with the join point
        if (s.els and not returns(s.then)) or _ends_with_assert(s.then):
            l_end = self.label()
            spans.append(self.jump(l_end))
        self.place(l_else)
        self.block(s.els)
        if _ends_with_assert(s.els):
            l_end = l_end or self.label()
            spans.append(self.jump(l_end))
        if l_end is not None:
            self.place(l_end)
        self.record(s, spans)

    def jump(self, label):
        pc = len(self.code)
        self.emit("JMP", label)
        return (pc, pc + 1)

    def while_stmt(self, s, start):
        head = self.label()
        self.place(head)
        self.invariants[head] = self.annotation(s.invariant)
        line, col = s.pos if s.pos else (0, 0)
        self.trace.loops[(self.info.name, line, col)] = head
        self.expr(s.cond)
        l_exit = self.label()
        self.emit("JZ", l_exit)
        spans = [(start, len(self.code))]
        self.block(s.body)
        spans.append(self.jump(head))
        self.place(l_exit)
        self.record(s, spans)

    # -- function ---------------------------------------------------------

    def run(self):
        info = self.info
        d = info.decl
        self.block(d.body)
        if d.ret is None and not returns(d.body):
            pc = len(self.code)
            self.emit("RET")
            self.trace.entries.append(TraceEntry(info.name, "exit", d.pos[0] if d.pos else 0,
                                                 ((pc, pc + 1),)))
        names = info.names_by_slot()
        table = AnnotationTable(
            requires=conj([self.annotation(r) for r in d.requires]),
            ensures=conj([self.annotation(e) for e in d.ensures]),
            invariants=dict(self.invariants),
            asserts=dict(self.asserts),
            varmap={info.slots[n]: slot_name(info.slots[n]) for n in names},
            sortmap={info.slots[n]: SORT[info.types[n]] for n in names},
        )
        return BytecodeFunction(
            name=info.name, nparams=len(d.params), nslots=len(names),
            ret=SORT[d.ret] if d.ret is not None else None,
            code=self.code, labels=dict(self.labels), table=table,
        )


def compile_program(tp):
    """Lower a typed program; returns ``(BytecodeModule, LoweringTrace)``."""
    trace = LoweringTrace()
    functions = [_FunctionCompiler(info, trace).run() for info in tp.functions.values()]
    return BytecodeModule(functions), trace


compile = compile_program  # noqa: A001  (public name used by the toolchain)

__all__ = ["CompilerBug", "LoweringTrace", "TraceEntry", "UnmappedVariable", "VarMap",
           "compile_program", "slot_name", "translate_formula"]
