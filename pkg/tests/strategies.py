"""Hypothesis strategies for random terms and formulas of the assertion logic."""

from hypothesis import strategies as st

from lissom.logic import (
    FALSE, TRUE, And, Atom, BinOp, Card, Forall, Idx, Imp, IntLit, Len, Not, Or, SetLit, Upd,
    Var,
)

INT_VARS = ("x", "y", "z")
S = Var("S", "set")
V = Var("v", "vec")
BINDERS = ("i", "j")


def int_terms(names=INT_VARS, partial=True):
    leaves = st.one_of(st.integers(-4, 4).map(IntLit), st.sampled_from([Var(n) for n in names]))
    ops = ["add", "sub", "mul"] + (["div", "mod"] if partial else [])

    def extend(inner):
        options = [
            st.tuples(st.sampled_from(ops), inner, inner).map(lambda t: BinOp(*t)),
            st.just(Len(V)),
            st.just(Card(S)),
        ]
        if partial:
            options.append(inner.map(lambda i: Idx(V, i)))
            options.append(st.tuples(inner, inner, inner).map(lambda t: Idx(Upd(V, t[0], t[1]), t[2])))
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=5)


def set_terms(names=INT_VARS):
    elems = st.lists(int_terms(names, partial=False), max_size=2).map(lambda xs: SetLit(tuple(xs)))
    base = st.one_of(st.just(S), elems)
    return st.one_of(base, st.tuples(st.sampled_from(["union", "inter", "diff"]), base, base)
                     .map(lambda t: BinOp(*t)))


def atoms(names=INT_VARS, partial=True):
    t = int_terms(names, partial)
    return st.one_of(
        st.tuples(st.sampled_from(["lt", "le", "eq"]), t, t).map(lambda a: Atom(*a)),
        st.tuples(t, set_terms(names)).map(lambda a: Atom("mem", *a)),
    )


def formulas(names=INT_VARS, partial=True, quantifiers=True, max_leaves=6):
    """Random formulas over ``x, y, z : int``, ``S : set`` and ``v : vec``."""

    def build(names, depth):
        base = st.one_of(st.just(TRUE), st.just(FALSE), atoms(names, partial))
        if depth == 0:
            return base
        sub = build(names, depth - 1)
        options = [
            base,
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Imp(*t)),
        ]
        if quantifiers:
            fresh = [b for b in BINDERS if b not in names]
            if fresh:
                options.append(st.sampled_from(fresh).flatmap(
                    lambda b: build(names + (b,), depth - 1).map(lambda body, b=b: Forall(b, body))))
        return st.one_of(*options)

    return build(tuple(names), 3)


def int_states(bound=2):
    r = st.integers(-bound, bound)
    return st.fixed_dictionaries({
        "x": r, "y": r, "z": r,
        "S": st.frozensets(r, max_size=3),
        "v": st.lists(r, max_size=3).map(tuple),
    })


def _int_expr(pure=False):
    names = ["x", "y", "len(v)"] + ([] if pure else ["read()"])
    return st.recursive(
        st.one_of(st.integers(-20, 20).map(str), st.sampled_from(names)),
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*", "div", "mod"]), inner)
              .map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            inner.map(lambda e: f"-{e}"),
            inner.map(lambda e: f"v[{e}]"),
        ),
        max_leaves=8,
    )


def _cond(pure=False):
    ops = st.sampled_from(["<", "<=", "==", "!=", ">", ">="])
    return st.tuples(_int_expr(pure), ops, _int_expr(pure)).map(lambda t: f"{t[0]} {t[1]} {t[2]}")


_stmt_no_assert = st.one_of(
    _int_expr().map(lambda e: f"print {e};"),
    _int_expr().map(lambda e: f"x := {e};"),
    st.tuples(_int_expr(), _int_expr()).map(lambda t: f"v[{t[0]}] := {t[1]};"),
    st.tuples(_cond(), _int_expr()).map(lambda t: f"if {t[0]} {{ y := {t[1]}; }} else {{ print y; }}"),
    st.tuples(st.integers(0, 3), _int_expr()).map(
        lambda t: f"x := 0; while x < {t[0]} invariant true {{ print {t[1]}; x := x + 1; }}"),
)
_stmt = st.one_of(_stmt_no_assert, _cond(pure=True).map(lambda c: f"assert {c};"))


def programs(asserts=True, max_size=6):
    """Random type-correct ``main`` bodies over ``x, y : int`` and ``v : vec``."""
    stmt = _stmt if asserts else _stmt_no_assert
    return st.tuples(st.lists(stmt, max_size=max_size), st.integers(0, 3)).map(
        lambda t: "fun main() { var x: int := 1; var y: int := 2;"
                  f" var v: vec := newvec({t[1]}); {' '.join(t[0])} }}")
