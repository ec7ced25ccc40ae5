"""Fourier-Motzkin search for Farkas coefficients (producer side only).

Constraints are ``(poly, kind, tag)`` with ``kind`` either ``"le"``
(``poly <= 0``) or ``"eq"`` (``poly = 0``).  ``refute`` returns a map
``tag -> coefficient`` whose combination is a positive constant, or None.
"""

from fractions import Fraction

from ..logic.arith import ONE

MAX_ROWS = 3000


class _Row:
    __slots__ = ("coef", "const", "origin")

    def __init__(self, coef, const, origin):
        self.coef = coef
        self.const = const
        self.origin = origin


def _combine(p, a, q, b):
    """a*p + b*q for rows p, q (a, b > 0)."""
    coef = {}
    for m, c in p.coef.items():
        coef[m] = c * a
    for m, c in q.coef.items():
        v = coef.get(m, 0) + c * b
        if v:
            coef[m] = v
        else:
            coef.pop(m, None)
    origin = {}
    for t, c in p.origin.items():
        origin[t] = c * a
    for t, c in q.origin.items():
        v = origin.get(t, 0) + c * b
        if v:
            origin[t] = v
        else:
            origin.pop(t, None)
    return _Row(coef, p.const * a + q.const * b, origin)


def _key(row):
    if not row.coef:
        return None
    first = row.coef[min(row.coef)]
    scale = abs(first)
    return tuple(sorted((m, c / scale) for m, c in row.coef.items())), scale


def refute(constraints, max_rows=MAX_ROWS, deadline_check=None):
    rows = []
    for poly, kind, tag in constraints:
        coef = {m: Fraction(c) for m, c in poly.items() if m != ONE and c}
        const = Fraction(poly.get(ONE, 0))
        rows.append(_Row(coef, const, {tag: Fraction(1)}))
        if kind == "eq":
            rows.append(_Row({m: -c for m, c in coef.items()}, -const, {tag: Fraction(-1)}))
    while True:
        if deadline_check:
            deadline_check()
        live = []
        best = {}
        for r in rows:
            if not r.coef:
                if r.const > 0:
                    return r.origin
                continue
            k, scale = _key(r)
            c = r.const / scale
            prev = best.get(k)
            if prev is None or c > prev[0]:
                best[k] = (c, r)
        live = [r for _, r in best.values()]
        if not live:
            return None
        counts = {}
        for r in live:
            for m, c in r.coef.items():
                pos, neg = counts.get(m, (0, 0))
                counts[m] = (pos + 1, neg) if c > 0 else (pos, neg + 1)
        m = min(counts, key=lambda k: (counts[k][0] * counts[k][1] - counts[k][0] - counts[k][1], k))
        pos = [r for r in live if r.coef.get(m, 0) > 0]
        neg = [r for r in live if r.coef.get(m, 0) < 0]
        rest = [r for r in live if m not in r.coef]
        if len(rest) + len(pos) * len(neg) > max_rows:
            return None
        for p in pos:
            for q in neg:
                rest.append(_combine(p, -q.coef[m], q, p.coef[m]))
        rows = rest
