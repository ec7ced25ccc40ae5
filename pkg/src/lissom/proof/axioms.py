"""Closed catalog of axiom schemas for sets, vectors, div/mod and integers.

Every schema is checked for validity by the bounded oracle in the test
suite.  Vector and division laws carry the guards under which their
partial operations are defined, so they hold in every total extension of
the partial functions.
"""

from ..logic.syntax import (
    INT, SET, VEC, And, Atom, BinOp, Card, Forall, Idx, Imp, IntLit, Len,
    NewVec, Not, Or, SetLit, Upd, Var, add, conj, disj, eq, iff, in_bounds, le,
    lt, mul, sub, subst_map, sort_of,
)

CATALOG_VERSION = 1
MAX_LIT = 8

_x, _y = Var("x"), Var("y")
_a, _b = Var("a"), Var("b")
_i, _j, _e, _n = Var("i"), Var("j"), Var("e"), Var("n")
_d = Var("d")
_A, _B = Var("A", SET), Var("B", SET)
_v = Var("v", VEC)


def _mem(x, s):
    return Atom("mem", x, s)


def _u(op, a, b):
    return BinOp(op, a, b)


def _lit_vars(k):
    return [Var(f"e{m}") for m in range(1, k + 1)]


def _build():
    cat = {
        "mem_union": iff(_mem(_x, _u("union", _A, _B)), Or(_mem(_x, _A), _mem(_x, _B))),
        "mem_inter": iff(_mem(_x, _u("inter", _A, _B)), And(_mem(_x, _A), _mem(_x, _B))),
        "mem_diff": iff(_mem(_x, _u("diff", _A, _B)), And(_mem(_x, _A), Not(_mem(_x, _B)))),
        "mem_lit0": Not(_mem(_x, SetLit(()))),
        "subset_def": iff(Atom("subset", _A, _B),
                          Forall("q", Imp(_mem(Var("q"), _A), _mem(Var("q"), _B)))),
        "card_nonneg": le(IntLit(0), Card(_A)),
        "card_empty": eq(Card(SetLit(())), IntLit(0)),
        "card_union_le": le(Card(_u("union", _A, _B)), add(Card(_A), Card(_B))),
        "card_inter_le": le(Card(_u("inter", _A, _B)), Card(_A)),
        "card_diff_le": le(Card(_u("diff", _A, _B)), Card(_A)),
        "card_subset_le": Imp(Atom("subset", _A, _B), le(Card(_A), Card(_B))),
        "len_nonneg": le(IntLit(0), Len(_v)),
        "len_upd": Imp(in_bounds(_v, _i), eq(Len(Upd(_v, _i, _e)), Len(_v))),
        "idx_upd_eq": Imp(And(in_bounds(_v, _i), eq(_i, _j)),
                          eq(Idx(Upd(_v, _i, _e), _j), _e)),
        "idx_upd_ne": Imp(And(in_bounds(_v, _i), And(in_bounds(_v, _j), Not(eq(_i, _j)))),
                          eq(Idx(Upd(_v, _i, _e), _j), Idx(_v, _j))),
        "len_newvec": Imp(le(IntLit(0), _n), eq(Len(NewVec(_n)), _n)),
        "idx_newvec": Imp(And(le(IntLit(0), _i), lt(_i, _n)), eq(Idx(NewVec(_n), _i), IntLit(0))),
        "divmod_pos": Imp(lt(IntLit(0), _d), conj([
            eq(_e, add(mul(_d, BinOp("div", _e, _d)), BinOp("mod", _e, _d))),
            le(IntLit(0), BinOp("mod", _e, _d)),
            lt(BinOp("mod", _e, _d), _d)])),
        "divmod_neg": Imp(lt(_d, IntLit(0)), conj([
            eq(_e, add(mul(_d, BinOp("div", _e, _d)), BinOp("mod", _e, _d))),
            le(IntLit(0), BinOp("mod", _e, _d)),
            lt(BinOp("mod", _e, _d), sub(IntLit(0), _d))])),
        "ne_split": Imp(Not(eq(_a, _b)), Or(lt(_a, _b), lt(_b, _a))),
    }
    for k in range(1, MAX_LIT + 1):
        es = _lit_vars(k)
        cat[f"mem_lit{k}"] = iff(_mem(_x, SetLit(tuple(es))), disj(eq(_x, e) for e in es))
        cat[f"card_lit{k}"] = le(Card(SetLit(tuple(es))), IntLit(k))
    return cat


CATALOG = _build()


def _metavars(f):
    from ..logic.syntax import free_vars

    return free_vars(f)


METAVARS = {k: _metavars(f) for k, f in CATALOG.items()}


def metavar_sorts():
    return METAVARS


class SchemaError(Exception):
    pass


def instantiate(schema, inst):
    """Instance of ``schema`` under ``inst`` (pairs metavar -> term).

    The instantiation must name every metavariable exactly once with a term
    of the right sort.
    """
    if schema not in CATALOG:
        raise SchemaError(f"unknown schema id {schema!r}")
    mv = METAVARS[schema]
    mapping = {}
    for name, t in inst:
        if name in mapping:
            raise SchemaError(f"metavariable {name} instantiated twice")
        if name not in mv:
            raise SchemaError(f"{schema} has no metavariable {name}")
        if sort_of(t) != mv[name]:
            raise SchemaError(f"metavariable {name} needs sort {mv[name]}")
        mapping[name] = t
    missing = set(mv) - set(mapping)
    if missing:
        raise SchemaError(f"uninstantiated metavariables {sorted(missing)}")
    return subst_map(CATALOG[schema], mapping)


__all__ = ["CATALOG", "CATALOG_VERSION", "METAVARS", "SchemaError", "instantiate", "INT"]
