"""Polynomial normal form for integer terms.

Non-arithmetic integer terms (variables, ``len``, ``card``, ``idx``,
``div``, ``mod``) are opaque atoms keyed by a normalized text, so
``idx(v, i+1)`` and ``idx(v, 1+i)`` are the same atom.  Products of atoms
form monomials; linear arithmetic then treats each monomial as a variable.
"""

from fractions import Fraction

from .syntax import (
    INT, Atom, BinOp, Card, Idx, IntLit, Len, LogicError, NewVec, Not, SetLit,
    Upd, Var, sort_of,
)

ONE = ()  # the empty monomial


def _add_into(acc, p, scale=1):
    for m, c in p.items():
        v = acc.get(m, 0) + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return acc


def poly_add(p, q, scale=1):
    return _add_into(dict(p), q, scale)


def poly_scale(p, k):
    if not k:
        return {}
    return {m: c * k for m, c in p.items()}


def poly_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly(t):
    """Polynomial of an Int-sorted term: dict monomial -> coefficient."""
    if isinstance(t, IntLit):
        return {ONE: t.value} if t.value else {}
    if isinstance(t, BinOp) and t.op in ("add", "sub", "mul"):
        a, b = poly(t.left), poly(t.right)
        if t.op == "add":
            return poly_add(a, b)
        if t.op == "sub":
            return poly_add(a, b, -1)
        return poly_mul(a, b)
    return {(atom_key(t),): 1}


def poly_text(p):
    if not p:
        return "0"
    parts = []
    for m in sorted(p):
        parts.append(str(p[m]) + "".join("*" + a for a in m))
    return "[" + " + ".join(parts) + "]"


def atom_key(t):
    """Normalized text of a term; Int subterms are rendered as polynomials."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, BinOp):
        if t.op in ("div", "mod"):
            return f"({t.op} {poly_text(poly(t.left))} {poly_text(poly(t.right))})"
        if t.op in ("add", "sub", "mul"):
            return poly_text(poly(t))
        return f"({t.op} {atom_key(t.left)} {atom_key(t.right)})"
    if isinstance(t, IntLit):
        return poly_text(poly(t))
    if isinstance(t, Len):
        return f"(len {atom_key(t.arg)})"
    if isinstance(t, Card):
        return f"(card {atom_key(t.arg)})"
    if isinstance(t, Idx):
        return f"(idx {atom_key(t.vec)} {poly_text(poly(t.index))})"
    if isinstance(t, Upd):
        return f"(upd {atom_key(t.vec)} {poly_text(poly(t.index))} {poly_text(poly(t.value))})"
    if isinstance(t, NewVec):
        return f"(newvec {poly_text(poly(t.length))})"
    if isinstance(t, SetLit):
        return "(set " + " ".join(poly_text(poly(e)) for e in t.elems) + ")"
    raise LogicError(f"not a term: {t!r}")


def linear_form(f):
    """Normalize a linear atom to ``(p, kind)`` meaning ``p <= 0`` or ``p = 0``.

    Strict integer inequalities are tightened (``a < b`` becomes
    ``a - b + 1 <= 0``).  Returns ``None`` for anything else.
    """
    neg = False
    if isinstance(f, Not):
        neg, f = True, f.arg
    if not isinstance(f, Atom) or f.op not in ("eq", "lt", "le"):
        return None
    if sort_of(f.left) != INT or sort_of(f.right) != INT:
        return None
    a, b = poly(f.left), poly(f.right)
    if f.op == "eq":
        if neg:
            return None
        return poly_add(a, b, -1), "eq"
    if f.op == "le":
        if neg:  # b < a
            return poly_add(poly_add(b, a, -1), {ONE: 1}), "le"
        return poly_add(a, b, -1), "le"
    if neg:  # b <= a
        return poly_add(b, a, -1), "le"
    return poly_add(poly_add(a, b, -1), {ONE: 1}), "le"


def to_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)
