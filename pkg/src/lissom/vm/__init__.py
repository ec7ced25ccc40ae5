"""The stack machine: bytecode model, assembly, binary form, loader and interpreter."""

from .asm import parse_lbc, print_lbc
from .binary import decode_module, encode_module
from .isa import Instr
from .loader import check_module, load_module
from .machine import OutOfFuel, Outcome, Trap, run
from .module import AnnotationTable, BytecodeFunction, BytecodeModule, MalformedModule

__all__ = [
    "AnnotationTable", "BytecodeFunction", "BytecodeModule", "Instr", "MalformedModule",
    "OutOfFuel", "Outcome", "Trap", "check_module", "decode_module", "encode_module",
    "load_module", "parse_lbc", "print_lbc", "run",
]
