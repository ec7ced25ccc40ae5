"""Instruction set.

Each opcode has a fixed operand kind and a fixed stack signature
``(popped sorts, pushed sort or None)``; the top of stack is the last
popped entry.  ``CALL`` and ``RET`` depend on function signatures and are
handled by the loader separately.

    PUSH n     -- int|bool      LOAD k      -- slot sort
    STORE k    slot sort --     JMP L / JZ L   (JZ pops a bool)
    ADD SUB MUL DIV MOD   int int -- int
    EQ LT LE   int int -- bool  NOT  bool -- bool   AND OR  bool bool -- bool
    NEWVEC     int -- vec       GETIDX  vec int -- int
    SETIDX     vec int int -- vec       VLEN  vec -- int
    NEWSET     -- set           SINS  set int -- set
    SUNION SINTER SDIFF  set set -- set
    SMEM       int set -- bool  SCARD  set -- int
    CALL f     args -- result   RET  [value] --
    READ       -- int           PRINT  int --       HALT
"""

from dataclasses import dataclass

from ..logic.syntax import BOOL, INT, SET, VEC

SORTS = (INT, BOOL, SET, VEC)

# operand kinds
NONE, LIT, SLOT, LABEL, FUNC = "none", "lit", "slot", "label", "func"

OPERAND = {
    "PUSH": LIT, "LOAD": SLOT, "STORE": SLOT, "JMP": LABEL, "JZ": LABEL, "CALL": FUNC,
}

SIGNATURE = {
    "ADD": ((INT, INT), INT), "SUB": ((INT, INT), INT), "MUL": ((INT, INT), INT),
    "DIV": ((INT, INT), INT), "MOD": ((INT, INT), INT),
    "EQ": ((INT, INT), BOOL), "LT": ((INT, INT), BOOL), "LE": ((INT, INT), BOOL),
    "NOT": ((BOOL,), BOOL), "AND": ((BOOL, BOOL), BOOL), "OR": ((BOOL, BOOL), BOOL),
    "JMP": ((), None), "JZ": ((BOOL,), None),
    "NEWVEC": ((INT,), VEC), "GETIDX": ((VEC, INT), INT),
    "SETIDX": ((VEC, INT, INT), VEC), "VLEN": ((VEC,), INT),
    "NEWSET": ((), SET), "SINS": ((SET, INT), SET),
    "SUNION": ((SET, SET), SET), "SINTER": ((SET, SET), SET), "SDIFF": ((SET, SET), SET),
    "SMEM": ((INT, SET), BOOL), "SCARD": ((SET,), INT),
    "READ": ((), INT), "PRINT": ((INT,), None), "HALT": ((), None),
}

OPCODES = (
    "PUSH", "LOAD", "STORE", "ADD", "SUB", "MUL", "DIV", "MOD", "EQ", "LT", "LE",
    "NOT", "AND", "OR", "JMP", "JZ", "NEWVEC", "GETIDX", "SETIDX", "VLEN",
    "NEWSET", "SINS", "SUNION", "SINTER", "SDIFF", "SMEM", "SCARD", "CALL",
    "RET", "READ", "PRINT", "HALT",
)
OPCODE_BYTE = {op: i for i, op in enumerate(OPCODES)}

TERMINATORS = ("JMP", "RET", "HALT")

I64_MIN, I64_MAX = -(1 << 63), (1 << 63) - 1


@dataclass(frozen=True)
class Instr:
    op: str
    arg: object = None

    def __str__(self):
        if self.arg is None:
            return self.op
        if isinstance(self.arg, bool):
            return f"{self.op} {'true' if self.arg else 'false'}"
        return f"{self.op} {self.arg}"


def operand_kind(op):
    return OPERAND.get(op, NONE)
