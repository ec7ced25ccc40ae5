"""The trusted certificate checker.

Checking is bidirectional: introduction rules are checked against an
expected formula, elimination rules synthesize their conclusion from their
children.  No proof search happens here.  This module may only depend on
``lissom.logic`` and the axiom catalog.
"""

import sys
from dataclasses import dataclass
from fractions import Fraction

from ..logic.arith import ONE, linear_form, poly_add, poly_scale
from ..logic.canon import to_text
from ..logic.semantics import EvalError, NonGround, eval_ground
from ..logic.syntax import (
    FALSE, INT, And, Atom, FalseF, Forall, Formula, Imp, LogicError, Not, Or,
    TrueF, Var, children, free_vars, is_quantifier_free, rebuild, sort_of,
    substitute,
)
from . import axioms
from .cert import (
    AndE1, AndE2, AndI, Axiom, Cert, Contra, Eval, ForallE, ForallI, Hyp, ImpE,
    ImpI, Lia, NotI, OrE, OrI1, OrI2, Refl, Rewrite,
)

if sys.getrecursionlimit() < 12000:
    sys.setrecursionlimit(12000)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    path: str = ""

    def __bool__(self):
        return self.ok


ACCEPT = Verdict(True)


class Reject(Exception):
    def __init__(self, reason, path):
        super().__init__(reason)
        self.reason = reason
        self.path = path


def same(f, g):
    """Equality up to renaming of bound variables."""
    return f == g or to_text(f) == to_text(g)


def check_certificate(goal, cert):
    """Accept iff ``cert`` derives ``goal`` from no hypotheses."""
    try:
        _check((), goal, cert, "")
    except Reject as r:
        return Verdict(False, r.reason, r.path or "root")
    except RecursionError:
        return Verdict(False, "derivation too deep", "root")
    except (LogicError, TypeError, ValueError, AttributeError, ZeroDivisionError) as e:
        return Verdict(False, f"malformed certificate: {e}", "root")
    return ACCEPT


def _p(path, k):
    return f"{path}.{k}" if path else str(k)


def _check(ctx, goal, c, path):
    if not isinstance(c, Cert):
        raise Reject("not a certificate node", path)
    if isinstance(c, AndI):
        if not isinstance(goal, And):
            raise Reject("conclusion mismatch: andI needs a conjunction", path)
        _check(ctx, goal.left, c.left, _p(path, 0))
        _check(ctx, goal.right, c.right, _p(path, 1))
    elif isinstance(c, (OrI1, OrI2)):
        if not isinstance(goal, Or):
            raise Reject("conclusion mismatch: orI needs a disjunction", path)
        if isinstance(c, OrI1):
            if not same(c.other, goal.right):
                raise Reject("conclusion mismatch: orI1 other disjunct", path)
            _check(ctx, goal.left, c.of, _p(path, 0))
        else:
            if not same(c.other, goal.left):
                raise Reject("conclusion mismatch: orI2 other disjunct", path)
            _check(ctx, goal.right, c.of, _p(path, 0))
    elif isinstance(c, OrE):
        d = _synth(ctx, c.of, _p(path, 0))
        if not isinstance(d, Or):
            raise Reject("orE on a non-disjunction", path)
        _check(ctx + (d.left,), goal, c.left, _p(path, 1))
        _check(ctx + (d.right,), goal, c.right, _p(path, 2))
    elif isinstance(c, ImpI):
        if not isinstance(goal, Imp) or not same(c.antecedent, goal.left):
            raise Reject("conclusion mismatch: impI antecedent", path)
        _check(ctx + (goal.left,), goal.right, c.body, _p(path, 0))
    elif isinstance(c, NotI):
        if not isinstance(goal, Not) or not same(c.formula, goal.arg):
            raise Reject("conclusion mismatch: notI", path)
        _check(ctx + (goal.arg,), FALSE, c.body, _p(path, 0))
    elif isinstance(c, Contra):
        _check(ctx, Not(Not(goal)), c.of, _p(path, 0))
    elif isinstance(c, ForallI):
        if not isinstance(goal, Forall):
            raise Reject("conclusion mismatch: forallI needs a quantifier", path)
        x = c.var
        if not isinstance(x, str) or not x:
            raise Reject("bad eigenvariable", path)
        if x in free_vars(goal) or any(x in free_vars(h) for h in ctx):
            raise Reject(f"freshness violation: {x} occurs free", path)
        _check(ctx, substitute(goal.body, goal.var, Var(x, INT)), c.body, _p(path, 0))
    elif isinstance(c, Lia):
        _lia(ctx, goal, c, path)
    elif isinstance(c, Rewrite):
        e = _synth(ctx, c.eq, _p(path, 0))
        if not (isinstance(e, Atom) and e.op == "eq"):
            raise Reject("rewrite needs an equation", path)
        source = _replace(goal, e.right, e.left, c.positions, path)
        _check(ctx, source, c.target, _p(path, 1))
    elif isinstance(c, ImpE):
        _check_impe(ctx, goal, c, path)
    else:
        got = _synth(ctx, c, path)
        if not same(got, goal):
            raise Reject(f"conclusion mismatch: derived {to_text(got)}, expected {to_text(goal)}", path)


def _check_impe(ctx, goal, c, path):
    try:
        imp = _synth(ctx, c.imp, _p(path, 0))
    except _NoSynth:
        imp = None
    if imp is not None:
        ante, concl = _split_imp(imp, path)
        if not same(concl, goal):
            raise Reject("conclusion mismatch: impE consequent", path)
        _check(ctx, ante, c.arg, _p(path, 1))
        return
    if isinstance(c.imp, ImpI):
        ante = c.imp.antecedent
    else:
        ante = _synth(ctx, c.arg, _p(path, 1))
    _check(ctx, Imp(ante, goal), c.imp, _p(path, 0))
    _check(ctx, ante, c.arg, _p(path, 1))


def _split_imp(f, path):
    if isinstance(f, Imp):
        return f.left, f.right
    if isinstance(f, Not):
        return f.arg, FALSE
    raise Reject("impE on a non-implication", path)


class _NoSynth(Reject):
    pass


def _synth(ctx, c, path):
    if isinstance(c, Hyp):
        if not isinstance(c.index, int) or not 0 <= c.index < len(ctx):
            raise Reject(f"bad hypothesis index {c.index}", path)
        return ctx[c.index]
    if isinstance(c, (AndE1, AndE2)):
        f = _synth(ctx, c.of, _p(path, 0))
        if not isinstance(f, And):
            raise Reject("andE on a non-conjunction", path)
        return f.left if isinstance(c, AndE1) else f.right
    if isinstance(c, ImpE):
        f = _synth(ctx, c.imp, _p(path, 0))
        ante, concl = _split_imp(f, path)
        _check(ctx, ante, c.arg, _p(path, 1))
        return concl
    if isinstance(c, ForallE):
        f = _synth(ctx, c.of, _p(path, 0))
        if not isinstance(f, Forall):
            raise Reject("forallE on a non-quantifier", path)
        if isinstance(c.witness, Formula) or sort_of(c.witness) != INT:
            raise Reject("forallE witness must be an integer term", path)
        return substitute(f.body, f.var, c.witness)
    if isinstance(c, Refl):
        if isinstance(c.term, Formula):
            raise Reject("refl on a formula", path)
        return Atom("eq", c.term, c.term)
    if isinstance(c, Eval):
        f = c.formula
        if not isinstance(f, Formula) or free_vars(f) or not is_quantifier_free(f):
            raise Reject("Eval on non-ground formula", path)
        try:
            ok = eval_ground(f)
        except (EvalError, NonGround) as e:
            raise Reject(f"Eval error: {e}", path)
        if ok is not True:
            raise Reject("Eval on false formula", path)
        return f
    if isinstance(c, Axiom):
        try:
            return axioms.instantiate(c.schema, c.inst)
        except axioms.SchemaError as e:
            raise Reject(str(e), path)
    if isinstance(c, (OrI1, OrI2)):
        f = _synth(ctx, c.of, _p(path, 0))
        return Or(f, c.other) if isinstance(c, OrI1) else Or(c.other, f)
    if isinstance(c, AndI):
        return And(_synth(ctx, c.left, _p(path, 0)), _synth(ctx, c.right, _p(path, 1)))
    if isinstance(c, ImpI):
        return Imp(c.antecedent, _synth(ctx + (c.antecedent,), c.body, _p(path, 0)))
    if isinstance(c, NotI):
        _check(ctx + (c.formula,), FALSE, c.body, _p(path, 0))
        return Not(c.formula)
    raise _NoSynth(f"cannot infer the conclusion of {type(c).__name__}", path)


def _lia(ctx, goal, c, path):
    if len(c.coeffs) != len(c.premises) or not c.premises:
        raise Reject("lia coefficient count mismatch", path)
    total = {}
    for k, (q, prem) in enumerate(zip(c.coeffs, c.premises)):
        if not isinstance(q, Fraction):
            raise Reject("lia coefficient must be rational", path)
        f = _synth(ctx, prem, _p(path, k))
        lf = linear_form(f)
        if lf is None:
            raise Reject(f"lia premise {k} is not a linear atom", path)
        p, kind = lf
        if kind == "le" and q < 0:
            raise Reject(f"negative coefficient on inequality premise {k}", path)
        total = poly_add(total, poly_scale(p, q))
    if isinstance(goal, FalseF):
        if set(total) - {ONE} or not total.get(ONE, 0) > 0:
            raise Reject("Farkas sum mismatch: combination is not a positive constant", path)
        return
    lg = linear_form(goal)
    if lg is None or lg[1] != "le":
        raise Reject("lia goal must be an inequality or false", path)
    diff = poly_add(lg[0], total, -1)
    if set(diff) - {ONE} or diff.get(ONE, 0) > 0:
        raise Reject("Farkas sum mismatch: combination does not entail goal", path)


def occurrences(node, target):
    """Preorder positions of ``target`` in ``node``; yields (index, bound names)."""
    out = []
    _occ(node, target, frozenset(), out)
    return out


def _occ(node, target, bound, out):
    if node == target:
        out.append(bound)
        return
    if isinstance(node, Forall):
        _occ(node.body, target, bound | {node.var}, out)
        return
    for k in children(node):
        _occ(k, target, bound, out)


def _replace(goal, old, new, positions, path):
    if isinstance(old, Formula) or isinstance(new, Formula):
        raise Reject("rewrite on formulas", path)
    positions = tuple(positions)
    if not positions or list(positions) != sorted(set(positions)):
        raise Reject("rewrite positions must be strictly increasing", path)
    names = set(free_vars(old)) | set(free_vars(new))
    counter = [0]
    wanted = set(positions)

    def go(node, bound):
        if node == old:
            k = counter[0]
            counter[0] += 1
            if k in wanted:
                if bound & names:
                    raise Reject("rewrite under a capturing binder", path)
                return new
            return node
        if isinstance(node, Forall):
            return Forall(node.var, go(node.body, bound | {node.var}))
        kids = children(node)
        if not kids:
            return node
        return rebuild(node, [go(k, bound) for k in kids])

    out = go(goal, frozenset())
    if positions[-1] >= counter[0]:
        raise Reject("rewrite position out of range", path)
    return out


__all__ = ["ACCEPT", "Verdict", "check_certificate", "occurrences", "same", "TrueF"]
