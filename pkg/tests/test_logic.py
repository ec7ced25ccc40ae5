import pytest
from hypothesis import assume, given, settings, strategies as st

from lissom.logic import (
    And, Atom, BinOp, Card, CounterModel, EvalError, Forall, Idx, Imp, IntLit, NonGround, Not,
    SetLit, SortMismatch, children, rebuild, TooLarge, Upd, Valid, Var, add, canonical_text, closed_text,
    enumerate_validity, eq, eval_ground, eval_term, free_vars, in_bounds, is_quantifier_free, le,
    lt, parse_closed, parse_formula, substitute,
)
from lissom.logic.semantics import domain

from helpers import compiled
from lissom.vcgen import generate_bytecode_obligations
from strategies import formulas, int_states, int_terms

x, y, i = Var("x"), Var("y"), Var("i")
v = Var("v", "vec")
QR = range(-2, 3)


def n(k):
    return IntLit(k)


# -- substitution -------------------------------------------------------------

def test_substitute_free_occurrence():
    assert substitute(le(x, n(5)), "x", add(x, n(1))) == le(add(x, n(1)), n(5))


def test_substitute_leaves_bound_occurrences():
    f = Forall("x", le(n(0), x))
    assert substitute(f, "x", n(7)) == f


def test_substitute_avoids_capture():
    out = substitute(Forall("y", le(y, x)), "x", add(y, n(1)))
    assert isinstance(out, Forall) and out.var != "y"
    assert out.body == le(Var(out.var), add(y, n(1)))
    assert free_vars(out) == {"y": "int"}


def test_substitute_checks_sorts():
    with pytest.raises(SortMismatch):
        substitute(le(x, n(5)), "x", v)


# -- ground evaluation ----------------------------------------------------------

def test_membership():
    assert eval_ground(Atom("mem", n(3), SetLit((n(1), n(3))))) is True


def test_card_of_union():
    s = BinOp("union", SetLit((n(1), n(2))), SetLit((n(2),)))
    assert eval_ground(eq(Card(s), n(2))) is True


def test_select_after_store():
    assert eval_ground(eq(Idx(Upd(v, n(0), n(9)), n(0)), n(9)), {"v": (0, 0)}) is True


def test_partial_operations_raise():
    with pytest.raises(EvalError) as e:
        eval_ground(eq(BinOp("div", x, n(0)), x), {"x": 1})
    assert e.value.kind == "DivByZero"
    with pytest.raises(EvalError):
        eval_ground(eq(Idx(v, n(2)), n(0)), {"v": (0, 0)})


def test_ground_evaluation_rejects_quantifiers_and_unbound_names():
    with pytest.raises(NonGround):
        eval_ground(Forall("i", eq(i, i)))
    with pytest.raises(NonGround):
        eval_ground(lt(x, n(1)))


@pytest.mark.parametrize("a,b", [(7, 2), (-7, 2), (7, -2), (-7, -2), (0, 3), (-1, 5)])
def test_euclidean_division(a, b):
    q = eval_term(BinOp("div", n(a), n(b)))
    r = eval_term(BinOp("mod", n(a), n(b)))
    assert a == b * q + r and 0 <= r < abs(b)


# -- enumeration oracle -----------------------------------------------------------

def test_identity_is_valid():
    assert isinstance(enumerate_validity(eq(add(x, n(0)), x), 2), Valid)


def test_first_counter_model_in_documented_order():
    assert enumerate_validity(lt(x, x), 1) == CounterModel({"x": -1})


def test_vector_counter_model():
    f = Forall("i", Imp(in_bounds(v, i), le(n(0), Idx(v, i))))
    r = enumerate_validity(f, 2, 3, 2)
    assert isinstance(r, CounterModel) and r.state == {"v": (-2,)}
    assert len(domain("vec", 2, 3, 2)) == 31


def test_domain_sizes():
    assert [len(domain(s, 3, 3, 3)) for s in ("int", "bool", "set", "vec")] == [7, 2, 64, 400]


def test_undefined_states_are_skipped():
    # x div x = 1 holds wherever it is defined
    r = enumerate_validity(eq(BinOp("div", x, x), n(1)), 2)
    assert r and r.undefined == 1


def test_state_space_ceiling():
    f = And(lt(Var("a"), Var("b")), lt(Var("c"), Var("d")))
    with pytest.raises(TooLarge):
        enumerate_validity(f, 10, ceiling=1000)
    with pytest.raises(ValueError):
        enumerate_validity(f, -1)


# -- canonical text ---------------------------------------------------------------

def test_canonical_examples():
    assert canonical_text(le(x, n(5))) == b"(le x 5)"
    assert canonical_text(Forall("i", eq(i, i))) == b"(forall q0 (eq q0 q0))"


def test_alpha_equivalent_formulas_share_text():
    assert canonical_text(Forall("i", le(i, x))) == canonical_text(Forall("j", le(Var("j"), x)))


def test_closed_text_round_trip():
    f = Forall("i", Imp(in_bounds(v, i), le(Idx(v, i), x)))
    env, g = parse_closed(closed_text(f))
    assert env == {"v": "vec", "x": "int"}
    assert canonical_text(g) == canonical_text(f)


def test_canonical_text_is_idempotent_on_corpus_vcs(corpus_name):
    for o in generate_bytecode_obligations(compiled(corpus_name)[0]):
        text = canonical_text(o.formula)
        assert canonical_text(parse_formula(text, free_vars(o.formula))) == text


# -- properties ---------------------------------------------------------------

def _eval(f, s):
    try:
        return eval_ground(f, s, QR)
    except EvalError:
        return None


@settings(max_examples=300, deadline=None)
@given(formulas(), st.sampled_from(["x", "y"]), int_terms(), int_states())
def test_substitution_lemma(f, var, t, s):
    try:
        val = eval_term(t, s, QR)
    except EvalError:
        assume(False)
    lhs = _eval(substitute(f, var, t), s)
    rhs = _eval(f, {**s, var: val})
    assume(lhs is not None and rhs is not None)
    assert lhs == rhs


def _rename_binders(f, names):
    """Alpha-variant of ``f`` whose k-th binder (preorder) is called ``names[k]``."""
    counter = iter(names)

    def go(node, env):
        if isinstance(node, Forall):
            new = next(counter)
            return Forall(new, go(node.body, {**env, node.var: Var(new)}))
        if isinstance(node, Var) and node.name in env:
            return env[node.name]
        kids = children(node)
        return rebuild(node, [go(k, env) for k in kids]) if kids else node

    return go(f, {})


@settings(max_examples=200, deadline=None)
@given(formulas(), st.lists(int_states(), min_size=1, max_size=5))
def test_equal_canonical_text_means_equal_meaning(f, states):
    g = _rename_binders(f, [f"b{k}" for k in range(50)])
    assert canonical_text(f) == canonical_text(g)
    for s in states:
        assert _eval(f, s) == _eval(g, s)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_canonical_text_round_trips(f):
    text = canonical_text(f)
    assert canonical_text(parse_formula(text, free_vars(f))) == text


@settings(max_examples=200, deadline=None)
@given(formulas(names=("x", "y"), quantifiers=False))
def test_oracle_agrees_with_evaluation(f):
    assume(is_quantifier_free(f))
    fv = free_vars(f)
    doms = {name: domain(sort, 1, 1, 1) for name, sort in fv.items()}
    import itertools
    names = sorted(doms)
    falsified = False
    for combo in itertools.product(*(doms[k] for k in names)):
        if _eval(f, dict(zip(names, combo))) is False:
            falsified = True
            break
    r = enumerate_validity(f, 1, 1, 1)
    assert bool(r) == (not falsified)
    if not r:
        assert _eval(f, r.state) is False


def test_alpha_variants_have_equal_text():
    f = Forall("i", Forall("j", lt(i, Var("j"))))
    g = Forall("j", Forall("i", lt(Var("j"), i)))
    assert canonical_text(f) == canonical_text(g)
    assert canonical_text(f) != canonical_text(Forall("i", Forall("j", lt(Var("j"), i))))


def test_negation_text_differs():
    assert canonical_text(Not(lt(x, y))) != canonical_text(lt(x, y))
