"""Binary module encoding, the form hashed inside bundles.

All integers are little-endian; counts and lengths are u64, strings are a
u64 byte length followed by UTF-8.  Layout::

    module   := u64 nfuncs, function*
    function := str name, u64 nparams, u64 nslots, u8 ret,
                u64 ninstr, instr*,
                u64 nlabels, (str label, u64 pc)*        sorted by label
                str requires, str ensures,
                u64 ninv, (str label, str formula)*      sorted by label
                u64 nassert, (u64 pc, str formula)*      sorted by pc
                u64 nvars, (u64 slot, str name, u8 sort)*  sorted by slot
    instr    := u8 opcode, operand
    operand  := PUSH: u8 kind (0 int, 1 bool), i64 value
                LOAD/STORE: u64 slot;  JMP/JZ/CALL: str;  otherwise empty
    ret/sort := 0 void, 1 int, 2 bool, 3 set, 4 vec

Formulas are stored as their s-expression text.
"""

import struct

from ..logic.canon import ParseError, parse_formula, to_sexpr_text
from ..logic.syntax import LogicError
from .isa import FUNC, I64_MAX, I64_MIN, LABEL, LIT, OPCODE_BYTE, OPCODES, SLOT, Instr, operand_kind
from .module import AnnotationTable, BytecodeFunction, BytecodeModule, MalformedModule

_SORT_BYTE = {None: 0, "int": 1, "bool": 2, "set": 3, "vec": 4}
_BYTE_SORT = {v: k for k, v in _SORT_BYTE.items()}
MAX_STRING = 1 << 24


def encode_module(m):
    out = bytearray()
    u64 = lambda n: out.extend(struct.pack("<Q", n))  # noqa: E731
    u8 = lambda n: out.append(n)  # noqa: E731

    def s(text):
        b = text.encode("utf-8")
        u64(len(b))
        out.extend(b)

    u64(len(m.functions))
    for f in m.functions:
        s(f.name)
        u64(f.nparams)
        u64(f.nslots)
        u8(_SORT_BYTE[f.ret])
        u64(len(f.code))
        for ins in f.code:
            u8(OPCODE_BYTE[ins.op])
            kind = operand_kind(ins.op)
            if kind == LIT:
                if isinstance(ins.arg, bool):
                    u8(1)
                    out.extend(struct.pack("<q", int(ins.arg)))
                else:
                    if not I64_MIN <= ins.arg <= I64_MAX:
                        raise MalformedModule("literal does not fit in 64 bits", f"{f.name}")
                    u8(0)
                    out.extend(struct.pack("<q", ins.arg))
            elif kind == SLOT:
                u64(ins.arg)
            elif kind in (LABEL, FUNC):
                s(ins.arg)
        u64(len(f.labels))
        for label in sorted(f.labels):
            s(label)
            u64(f.labels[label])
        t = f.table
        s(to_sexpr_text(t.requires))
        s(to_sexpr_text(t.ensures))
        u64(len(t.invariants))
        for label in sorted(t.invariants):
            s(label)
            s(to_sexpr_text(t.invariants[label]))
        u64(len(t.asserts))
        for pc in sorted(t.asserts):
            u64(pc)
            s(to_sexpr_text(t.asserts[pc]))
        u64(len(t.varmap))
        for k in sorted(t.varmap):
            u64(k)
            s(t.varmap[k])
            u8(_SORT_BYTE[t.sortmap[k]])
    return bytes(out)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def need(self, n):
        if n < 0 or self.pos + n > len(self.data):
            raise MalformedModule("truncated module", f"byte {self.pos}")

    def u8(self):
        self.need(1)
        v = self.data[self.pos]
        self.pos += 1
        return v

    def u64(self):
        self.need(8)
        v = struct.unpack_from("<Q", self.data, self.pos)[0]
        self.pos += 8
        return v

    def i64(self):
        self.need(8)
        v = struct.unpack_from("<q", self.data, self.pos)[0]
        self.pos += 8
        return v

    def count(self, min_size):
        n = self.u64()
        if n * min_size > len(self.data) - self.pos:
            raise MalformedModule("count exceeds remaining data", f"byte {self.pos}")
        return n

    def str(self):
        n = self.u64()
        if n > MAX_STRING:
            raise MalformedModule("string too long", f"byte {self.pos}")
        self.need(n)
        raw = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedModule("invalid UTF-8", f"byte {self.pos}") from None


def decode_module(data):
    """Inverse of ``encode_module``; any inconsistency is MalformedModule."""
    r = _Reader(data)
    funcs = []
    for _ in range(r.count(8)):
        name = r.str()
        nparams, nslots = r.u64(), r.u64()
        rb = r.u8()
        if rb not in _BYTE_SORT:
            raise MalformedModule("bad return sort byte", name)
        code = []
        for _ in range(r.count(1)):
            ob = r.u8()
            if ob >= len(OPCODES):
                raise MalformedModule(f"bad opcode byte {ob}", f"{name}@{len(code)}")
            op = OPCODES[ob]
            kind = operand_kind(op)
            if kind == LIT:
                k = r.u8()
                v = r.i64()
                if k == 0:
                    code.append(Instr(op, v))
                elif k == 1 and v in (0, 1):
                    code.append(Instr(op, bool(v)))
                else:
                    raise MalformedModule("bad literal", f"{name}@{len(code)}")
            elif kind == SLOT:
                code.append(Instr(op, r.u64()))
            elif kind in (LABEL, FUNC):
                code.append(Instr(op, r.str()))
            else:
                code.append(Instr(op))
        labels = {}
        for _ in range(r.count(16)):
            label = r.str()
            if label in labels:
                raise MalformedModule(f"duplicate label {label}", name)
            labels[label] = r.u64()
        raw = {"requires": r.str(), "ensures": r.str()}
        invs = []
        for _ in range(r.count(16)):
            invs.append((r.str(), r.str()))
        asserts = []
        for _ in range(r.count(16)):
            asserts.append((r.u64(), r.str()))
        t = AnnotationTable()
        for _ in range(r.count(17)):
            slot, vname, sb = r.u64(), r.str(), r.u8()
            if sb not in _BYTE_SORT or sb == 0 or slot in t.varmap:
                raise MalformedModule("bad variable entry", name)
            t.varmap[slot] = vname
            t.sortmap[slot] = _BYTE_SORT[sb]
        ret = _BYTE_SORT[rb]
        env = {t.varmap[k]: t.sortmap[k] for k in t.varmap}
        for k in range(min(nparams, 1 << 16)):
            if k in t.varmap:
                env["\\old_" + t.varmap[k]] = t.sortmap[k]
        if ret is not None:
            env["\\result"] = ret

        def fml(text):
            try:
                return parse_formula(text, env)
            except (ParseError, LogicError, RecursionError) as e:
                raise MalformedModule(f"bad formula: {e}", name) from None

        t.requires = fml(raw["requires"])
        t.ensures = fml(raw["ensures"])
        for label, text in invs:
            if label in t.invariants:
                raise MalformedModule(f"two invariants for {label}", name)
            t.invariants[label] = fml(text)
        for pc, text in asserts:
            if pc in t.asserts:
                raise MalformedModule(f"two asserts at {pc}", name)
            t.asserts[pc] = fml(text)
        funcs.append(BytecodeFunction(name, nparams, nslots, ret, code, labels, t))
    if r.pos != len(data):
        raise MalformedModule("trailing bytes after module", f"byte {r.pos}")
    return BytecodeModule(funcs)
