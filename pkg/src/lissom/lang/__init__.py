"""LISS: source language front end and reference interpreter."""

from .interp import SrcOutcome, SrcOutOfFuel, SrcTrap, interpret_source
from .parser import LissSyntaxError, parse_expr, parse_program
from .pretty import program_text
from .typecheck import Diagnostic, LissTypeError, TypedProgram, typecheck

__all__ = [
    "Diagnostic", "LissSyntaxError", "LissTypeError", "SrcOutOfFuel", "SrcOutcome",
    "SrcTrap", "TypedProgram", "interpret_source", "parse_expr", "parse_program",
    "program_text", "typecheck",
]
