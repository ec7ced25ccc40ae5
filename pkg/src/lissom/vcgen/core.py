"""Level-independent machinery shared by the source and bytecode generators.

Both generators build, for every segment between cut points, a small
*VC tree* describing the weakest precondition of the segment:

``Goal(f, tag)``
    the segment ends at a cut point whose annotation (after substitution)
    is ``f``; ``tag`` is ``("post",)`` or ``("inv", key)``.
``Both(a, b)``
    conjunction of the two branches of a conditional.
``Assume(h, body)``
    ``h`` may be assumed in ``body`` (branch conditions, callee ensures).
``Check(site, g, loc, body)``
    ``g`` must hold here (a separate obligation) and is assumed afterwards.
``Split(c, then, else)``
    the loop-exit test of a loop-head segment; each side yields its own
    main obligation.

Because both levels produce the same tree for corresponding code, and
obligations are read off the tree by the functions below, the two
obligation multisets coincide up to renaming of variables.
"""

from dataclasses import dataclass

from ..logic.syntax import And, Imp, Not, conj, equal, make_var, subst_map
from .obligation import Obligation

PRE = "precondition-entailment"
ESTABLISH = "invariant-establishment"
PRESERVE = "invariant-preservation"
POST = "postcondition"
ASSERT = "assert"


def safety(kind):
    return f"safety({kind})"


@dataclass(frozen=True)
class Goal:
    formula: object
    tag: tuple


@dataclass(frozen=True)
class Both:
    left: object
    right: object


@dataclass(frozen=True)
class Assume:
    hyp: object
    body: object


@dataclass(frozen=True)
class Check:
    site: str
    formula: object
    loc: object
    body: object


@dataclass(frozen=True)
class Split:
    cond: object
    then: object
    els: object


class VCError(Exception):
    pass


def subst(t, mapping):
    """Apply a simultaneous substitution to every formula in a VC tree."""
    if not mapping:
        return t
    if isinstance(t, Goal):
        return Goal(subst_map(t.formula, mapping), t.tag)
    if isinstance(t, Both):
        return Both(subst(t.left, mapping), subst(t.right, mapping))
    if isinstance(t, Assume):
        return Assume(subst_map(t.hyp, mapping), subst(t.body, mapping))
    if isinstance(t, Check):
        return Check(t.site, subst_map(t.formula, mapping), t.loc, subst(t.body, mapping))
    if isinstance(t, Split):
        return Split(subst_map(t.cond, mapping), subst(t.then, mapping), subst(t.els, mapping))
    raise VCError(f"not a VC tree: {t!r}")


def wrap(events, body):
    """Nest ``body`` under evaluation events, the first event outermost.

    An event is ``("check", site, formula, loc)`` or
    ``("call", pre, post, loc)``.
    """
    for ev in reversed(events):
        if ev[0] == "check":
            _, site, g, loc = ev
            body = Check(site, g, loc, body)
        else:
            _, pre, post, loc = ev
            body = Check(PRE, pre, loc, Assume(post, body))
    return body


# -- reading obligations off a tree ------------------------------------------

def _mains(t):
    """List of ``(formula, tags, side)``; ``side`` is set below a Split."""
    if isinstance(t, Goal):
        return [(t.formula, frozenset([t.tag]), None)]
    if isinstance(t, Both):
        (a, ta, sa), = _single(_mains(t.left))
        (b, tb, sb), = _single(_mains(t.right))
        return [(And(a, b), ta | tb, None)]
    if isinstance(t, Assume):
        return [(Imp(t.hyp, f), tags, side) for f, tags, side in _mains(t.body)]
    if isinstance(t, Check):
        return [(Imp(t.formula, f), tags, side) for f, tags, side in _mains(t.body)]
    if isinstance(t, Split):
        return ([(Imp(t.cond, f), tags, "then") for f, tags, _ in _mains(t.then)]
                + [(Imp(Not(t.cond), f), tags, "else") for f, tags, _ in _mains(t.els)])
    raise VCError(f"not a VC tree: {t!r}")


def _single(ms):
    if len(ms) != 1:
        raise VCError("loop exit test inside a conditional branch")
    return ms


def _sides(t):
    """Side obligations ``(site, loc, formula)`` in evaluation order."""
    if isinstance(t, Goal):
        return []
    if isinstance(t, Both):
        return _sides(t.left) + _sides(t.right)
    if isinstance(t, Assume):
        return [(s, l, Imp(t.hyp, f)) for s, l, f in _sides(t.body)]
    if isinstance(t, Check):
        return [(t.site, t.loc, t.formula)] + [(s, l, Imp(t.formula, f)) for s, l, f in _sides(t.body)]
    if isinstance(t, Split):
        return ([(s, l, Imp(t.cond, f)) for s, l, f in _sides(t.then)]
                + [(s, l, Imp(Not(t.cond), f)) for s, l, f in _sides(t.els)])
    raise VCError(f"not a VC tree: {t!r}")


def main_site(tags, side, own):
    if side == "then" and ("inv", own) in tags:
        return PRESERVE
    if ("post",) in tags:
        return POST
    if any(t[0] == "inv" for t in tags):
        return ESTABLISH
    return POST


def segment_obligations(level, function, hyp, tree, own, loc, fmt_loc):
    """Obligations of one segment starting with hypothesis ``hyp``.

    ``own`` is the loop key of a loop-head segment (None for the entry).
    Side obligations come first, in evaluation order, then the main ones.
    """
    out = []
    for site, l, f in _sides(tree):
        out.append(Obligation.make(Imp(hyp, f), level, function, site, fmt_loc(l)))
    for f, tags, side in _mains(tree):
        out.append(Obligation.make(Imp(hyp, f), level, function, main_site(tags, side, own),
                                   fmt_loc(loc)))
    return out


# -- entry and call conventions ------------------------------------------------

def old_name(name):
    return "\\old_" + name


def entry_hypothesis(requires, params, ensures_free):
    """``requires`` plus ``\\old_p = p`` for each parameter whose ghost occurs
    free in the ensures clause; ``params`` is ``[(name, sort)]`` in slot order."""
    eqs = [equal(make_var(old_name(p), s), make_var(p, s))
           for p, s in params if old_name(p) in ensures_free]
    return conj([requires] + eqs)


def call_name(k):
    return f"$call{k}"


def read_name(k):
    return f"$read{k}"


def callee_contract(requires, ensures, params, assigned, args, k, ret):
    """Instantiate a callee contract at call site ``k``.

    ``params`` is ``[(name, sort)]``; parameters the callee assigns have an
    unknown final value, named ``$call{k}_p{i}``.  Returns
    ``(pre, post, result)``.
    """
    result = make_var(call_name(k), ret)
    pre = subst_map(requires, {p: a for (p, _), a in zip(params, args)})
    m = {"\\result": result}
    for i, ((p, s), a) in enumerate(zip(params, args)):
        m[old_name(p)] = a
        m[p] = make_var(f"{call_name(k)}_p{i}", s) if i in assigned else a
    return pre, subst_map(ensures, m), result
