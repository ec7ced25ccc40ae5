"""Proof-carrying code toolchain for the LISS language."""

__version__ = "0.1.0"
