"""Textual assembly (``.lbc``).

::

    .function main 0 2 void
    #var 0 v0 int
    #requires true
    #ensures true
    #invariant L0 (le 0 v0)
    #assert 4 (le 0 v0)
      PUSH 0
      STORE 0
    L0:
      ...
    .end

Instructions may also be separated by ``;`` and ``//`` starts a comment.
A file without any ``.function`` header is a single void ``main`` with no
parameters; there, ``LOAD``/``STORE`` may name variables, which become
int slots in order of first use.
"""

import re

from ..logic.canon import ParseError, parse_formula, to_sexpr_text
from ..logic.syntax import LogicError
from .isa import FUNC, LABEL, LIT, OPCODES, SLOT, SORTS, Instr, operand_kind
from .module import AnnotationTable, BytecodeFunction, BytecodeModule, MalformedModule

_IDENT = re.compile(r"[A-Za-z_$\\][A-Za-z0-9_$'\\]*\Z")
_INT = re.compile(r"-?\d+\Z")


def parse_lbc(text):
    """Parse assembly text; structural checks are left to the loader."""
    lines = text.splitlines()
    if not any(l.strip().startswith(".function") for l in lines):
        return _headerless(lines)
    funcs = []
    cur = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        where = f"line {no}"
        if line.startswith(".function"):
            if cur is not None:
                raise MalformedModule("nested .function", where)
            cur = _Builder(_header(line, where), where)
        elif line == ".end":
            if cur is None:
                raise MalformedModule(".end without .function", where)
            funcs.append(cur.finish())
            cur = None
        elif cur is None:
            raise MalformedModule("text outside a function", where)
        elif line.startswith("#"):
            cur.pragma(line, where)
        else:
            cur.code_line(line, where)
    if cur is not None:
        raise MalformedModule("missing .end", cur.where)
    return BytecodeModule(funcs)


def _header(line, where):
    parts = line.split()
    if len(parts) != 5 or not _IDENT.match(parts[1]):
        raise MalformedModule("expected .function NAME NPARAMS NSLOTS RET", where)
    try:
        nparams, nslots = int(parts[2]), int(parts[3])
    except ValueError:
        raise MalformedModule("parameter and slot counts must be integers", where) from None
    ret = parts[4]
    if ret != "void" and ret not in SORTS:
        raise MalformedModule(f"unknown return sort {ret!r}", where)
    return parts[1], nparams, nslots, None if ret == "void" else ret


class _Builder:
    def __init__(self, header, where, auto_slots=False):
        self.name, self.nparams, self.nslots, self.ret = header
        self.where = where
        self.auto_slots = auto_slots
        self.code = []
        self.labels = {}
        self.table = AnnotationTable()
        self.raw = []  # (kind, key, text, where)

    def pragma(self, line, where):
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "#var":
            parts = rest.split()
            if len(parts) != 3 or not _INT.match(parts[0]) or not _IDENT.match(parts[1]):
                raise MalformedModule("expected #var SLOT NAME SORT", where)
            slot = int(parts[0])
            if slot in self.table.varmap:
                raise MalformedModule(f"slot {slot} declared twice", where)
            if parts[2] not in SORTS:
                raise MalformedModule(f"unknown sort {parts[2]!r}", where)
            self.table.varmap[slot] = parts[1]
            self.table.sortmap[slot] = parts[2]
        elif word in ("#requires", "#ensures"):
            self.raw.append((word[1:], None, rest, where))
        elif word == "#invariant":
            label, _, f = rest.partition(" ")
            self.raw.append(("invariant", label, f.strip(), where))
        elif word == "#assert":
            pc, _, f = rest.partition(" ")
            if not _INT.match(pc):
                raise MalformedModule("expected #assert PC FORMULA", where)
            self.raw.append(("assert", int(pc), f.strip(), where))
        else:
            raise MalformedModule(f"unknown pragma {word!r}", where)

    def code_line(self, line, where):
        for item in line.split(";"):
            item = item.strip()
            while item:
                m = re.match(r"([A-Za-z_][A-Za-z0-9_]*):(.*)\Z", item)
                if not m:
                    break
                if m.group(1) in self.labels:
                    raise MalformedModule(f"duplicate label {m.group(1)}", where)
                self.labels[m.group(1)] = len(self.code)
                item = m.group(2).strip()
            if item:
                self.code.append(self.instr(item, where))

    def instr(self, item, where):
        parts = item.split()
        op = parts[0].upper()
        if op not in OPCODES:
            raise MalformedModule(f"unknown opcode {parts[0]!r}", where)
        kind = operand_kind(op)
        if kind == "none":
            if len(parts) != 1:
                raise MalformedModule(f"{op} takes no operand", where)
            return Instr(op)
        if len(parts) != 2:
            raise MalformedModule(f"{op} takes one operand", where)
        a = parts[1]
        if kind == LIT:
            if a in ("true", "false"):
                return Instr(op, a == "true")
            if not _INT.match(a):
                raise MalformedModule(f"bad literal {a!r}", where)
            return Instr(op, int(a))
        if kind == SLOT:
            if _INT.match(a):
                return Instr(op, int(a))
            if not _IDENT.match(a):
                raise MalformedModule(f"bad slot {a!r}", where)
            return Instr(op, a)  # resolved in finish()
        if kind in (LABEL, FUNC):
            if not _IDENT.match(a):
                raise MalformedModule(f"bad name {a!r}", where)
            return Instr(op, a)
        raise AssertionError(kind)

    def _resolve(self, name, where):
        slot = self.table.slot_of(name)
        if slot is None:
            if not self.auto_slots:
                raise MalformedModule(f"unknown variable {name!r}", where)
            slot = len(self.table.varmap)
            self.table.varmap[slot] = name
            self.table.sortmap[slot] = "int"
            self.nslots = max(self.nslots, slot + 1)
        return slot

    def finish(self):
        code = []
        for ins in self.code:
            if operand_kind(ins.op) == SLOT and isinstance(ins.arg, str):
                ins = Instr(ins.op, self._resolve(ins.arg, self.where))
            code.append(ins)
        env = {self.table.varmap[k]: self.table.sortmap[k] for k in self.table.varmap}
        for k in range(self.nparams):
            if k in self.table.varmap:
                env["\\old_" + self.table.varmap[k]] = self.table.sortmap[k]
        if self.ret is not None:
            env["\\result"] = self.ret
        t = self.table
        for kind, key, text, where in self.raw:
            try:
                f = parse_formula(text, env)
            except (ParseError, LogicError) as e:
                raise MalformedModule(f"bad formula: {e}", where) from None
            if kind == "requires":
                t.requires = f
            elif kind == "ensures":
                t.ensures = f
            elif kind == "invariant":
                if key in t.invariants:
                    raise MalformedModule(f"two invariants for {key}", where)
                t.invariants[key] = f
            else:
                if key in t.asserts:
                    raise MalformedModule(f"two asserts at pc {key}", where)
                t.asserts[key] = f
        return BytecodeFunction(self.name, self.nparams, self.nslots, self.ret, code, self.labels, t)


def _headerless(lines):
    b = _Builder(("main", 0, 0, None), "line 1", auto_slots=True)
    for no, raw in enumerate(lines, 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            b.pragma(line, f"line {no}")
        else:
            b.code_line(line, f"line {no}")
    f = b.finish()
    f.nslots = max([f.nslots] + [k + 1 for k in f.table.varmap])
    return BytecodeModule([f])


def print_lbc(module):
    """Canonical assembly text of ``module``."""
    out = []
    for f in module.functions:
        out.append(f".function {f.name} {f.nparams} {f.nslots} {f.ret or 'void'}")
        t = f.table
        for k in sorted(t.varmap):
            out.append(f"#var {k} {t.varmap[k]} {t.sortmap[k]}")
        out.append(f"#requires {to_sexpr_text(t.requires)}")
        out.append(f"#ensures {to_sexpr_text(t.ensures)}")
        for label in sorted(t.invariants):
            out.append(f"#invariant {label} {to_sexpr_text(t.invariants[label])}")
        for pc in sorted(t.asserts):
            out.append(f"#assert {pc} {to_sexpr_text(t.asserts[pc])}")
        for pc, ins in enumerate(f.code):
            for label in f.label_at(pc):
                out.append(f"{label}:")
            out.append(f"  {ins}")
        for label in f.label_at(len(f.code)):
            out.append(f"{label}:")
        out.append(".end")
    return "\n".join(out) + "\n"
