"""Proof obligations and their stable identifiers."""

import hashlib
from dataclasses import dataclass

from ..logic.canon import closed_text

SOURCE, BYTECODE = "source", "bytecode"


def obligation_id(formula):
    """SHA-256 of the canonical text of the universal closure."""
    return hashlib.sha256(closed_text(formula).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Obligation:
    id: str
    formula: object
    level: str
    function: str
    site: str
    location: str

    @classmethod
    def make(cls, formula, level, function, site, location):
        return cls(obligation_id(formula), formula, level, function, site, location)

    @property
    def text(self):
        return closed_text(self.formula)

    def tsv(self):
        return f"{self.id}\t{self.level}\t{self.function}\t{self.site}\t{self.location}"


class UncoveredCycle(Exception):
    def __init__(self, function, cycle):
        self.function = function
        self.cycle = tuple(cycle)
        super().__init__(f"{function}: cycle without an invariant through pcs "
                         + " -> ".join(map(str, self.cycle)))


class SymbolicStackMismatch(Exception):
    def __init__(self, function, pc, reason):
        self.function = function
        self.pc = pc
        super().__init__(f"{function} pc {pc}: {reason}")
