"""Bytecode module, functions and annotation tables."""

from dataclasses import dataclass, field

from ..logic.syntax import TRUE


class MalformedModule(Exception):
    def __init__(self, reason, location=""):
        super().__init__(f"{location}: {reason}" if location else reason)
        self.reason = reason
        self.location = location


@dataclass
class AnnotationTable:
    requires: object = TRUE
    ensures: object = TRUE
    invariants: dict = field(default_factory=dict)   # label -> Formula
    asserts: dict = field(default_factory=dict)      # pc -> Formula
    varmap: dict = field(default_factory=dict)       # slot -> logical name
    sortmap: dict = field(default_factory=dict)      # slot -> sort

    def slot_of(self, name):
        for k, n in self.varmap.items():
            if n == name:
                return k
        return None


@dataclass
class BytecodeFunction:
    name: str
    nparams: int
    nslots: int
    ret: object                # sort name or None for void
    code: list
    labels: dict               # label -> pc
    table: AnnotationTable = field(default_factory=AnnotationTable)

    def label_at(self, pc):
        """Labels attached to ``pc``, sorted."""
        return sorted(l for l, p in self.labels.items() if p == pc)

    def param_names(self):
        return [self.table.varmap[k] for k in range(self.nparams)]


@dataclass
class BytecodeModule:
    functions: list

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def names(self):
        return [f.name for f in self.functions]
