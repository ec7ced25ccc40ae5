"""Verification-condition generation for source programs and bytecode."""

from .bytecode import check_coverage, generate_bytecode_obligations  # noqa: F401
from .obligation import (  # noqa: F401
    BYTECODE, SOURCE, Obligation, SymbolicStackMismatch, UncoveredCycle, obligation_id,
)


def __getattr__(name):
    # the source generator pulls in the language front end; load it lazily so
    # the consumer side never imports it
    if name in ("generate_source_obligations", "wp_source"):
        from . import source

        return getattr(source, name)
    raise AttributeError(name)
