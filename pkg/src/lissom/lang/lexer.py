"""Tokenizer for LISS source."""

import re
from dataclasses import dataclass

KEYWORDS = frozenset("""
fun var if else while invariant assert return print requires ensures
and or not true false forall in subset union inter diff div mod
len card newvec read int bool set vec
""".split())

_SYMBOLS = [
    "<==>", "==>", ":=", "::", "==", "!=", "<=", ">=",
    "<", ">", "=", "+", "-", "*", "(", ")", "{", "}", "[", "]", ",", ";", ":",
]

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<ghost>\\result|\\old)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in _SYMBOLS) + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str      # "int", "ident", "eof", or the keyword / symbol itself
    text: str
    line: int
    col: int


class LexError(Exception):
    def __init__(self, msg, line, col):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


def tokenize(text):
    out = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise LexError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "int":
            out.append(Token("int", s, line, col))
        elif kind == "ident":
            out.append(Token(s if s in KEYWORDS else "ident", s, line, col))
        elif kind in ("sym", "ghost"):
            out.append(Token(s, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out
