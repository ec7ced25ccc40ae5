"""Certificates, the trusted checker and the (untrusted) prover."""

from .cert import CertSyntaxError, cert_text, parse_certificate
from .checker import ACCEPT, Verdict, check_certificate

__all__ = ["ACCEPT", "CertSyntaxError", "Verdict", "cert_text", "check_certificate", "parse_certificate"]
