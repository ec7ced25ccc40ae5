from collections import Counter
from pathlib import Path

import pytest
from hypothesis import assume, given, settings, strategies as st

from lissom.lang import parse_program, typecheck
from lissom.logic import (
    TRUE, And, Imp, IntLit, Or, TooLarge, Var, add, enumerate_validity, eq,
    in_bounds, le, lt, mul,
)
from lissom.producer import translated_source_obligations
from lissom.vcgen import (
    SymbolicStackMismatch, UncoveredCycle, generate_bytecode_obligations, obligation_id,
    wp_source,
)
from lissom.vcgen import generate_source_obligations
from lissom.vm import load_module, parse_lbc, print_lbc

from helpers import compiled, corpus, typed, typed_text
from strategies import programs

GOLDEN = Path(__file__).parent / "golden"

WP_PROG = typed_text("fun f(x: int, a: vec, i: int): int { x := x + 1; x := a[i]; return x; }"
                     " fun main() { }")
x, a, i = Var("x"), Var("a", "vec"), Var("i")


def body(name, tp=WP_PROG):
    return tp.info(name).decl.body


def test_wp_assignment():
    pre, side = wp_source(WP_PROG, "f", body("f")[:1], le(x, IntLit(5)))
    assert pre == le(add(x, IntLit(1)), IntLit(5))
    assert side == []


def test_wp_index_guard():
    pre, side = wp_source(WP_PROG, "f", body("f")[1:2], TRUE)
    assert side == [("safety(OutOfBounds)", in_bounds(a, i))]


def test_sum_function_obligations():
    obs = [o for o in generate_source_obligations(typed("sum")) if o.function == "sum"]
    assert [o.site for o in obs] == ["invariant-establishment", "invariant-preservation",
                                     "postcondition"]
    for o in obs:
        assert enumerate_validity(o.formula, 3, 3, 3)


def test_empty_main_has_one_trivial_obligation():
    (o,) = generate_source_obligations(typed_text("fun main() { }"))
    assert o.site == "postcondition"
    assert enumerate_validity(o.formula, 0)


def test_obligation_ids_are_stable(corpus_name):
    text = corpus()[corpus_name][0]
    first = [o.id for o in generate_source_obligations(typed(corpus_name))]
    second = [o.id for o in generate_source_obligations(typed_text(text))]
    assert first == second
    for o in generate_bytecode_obligations(compiled(corpus_name)[0]):
        assert o.id == obligation_id(o.formula)


def test_vmax_golden_file():
    rows = ["\t".join([o.function, o.site, o.location, o.text])
            for o in generate_source_obligations(typed("vmax"))]
    assert rows == (GOLDEN / "vmax_source.tsv").read_text().splitlines()


STRAIGHT = """.function f 0 1 int
#var 0 x int
#requires true
#ensures (eq \\result 5)
  PUSH 2
  PUSH 3
  ADD
  STORE 0
  LOAD 0
  RET
.end
"""


def test_straight_line_bytecode():
    (o,) = generate_bytecode_obligations(load_module(STRAIGHT))
    assert o.formula == Imp(TRUE, eq(add(IntLit(2), IntLit(3)), IntLit(5)))
    assert o.site == "postcondition" and o.location == "pc 0"
    assert enumerate_validity(o.formula, 0)


def test_missing_invariant_is_an_uncovered_cycle():
    text = print_lbc(compiled("sum")[0])
    stripped = "\n".join(l for l in text.splitlines() if not l.startswith("#invariant"))
    m = parse_lbc(stripped)
    with pytest.raises(UncoveredCycle) as e:
        generate_bytecode_obligations(m)
    assert e.value.function == "sum"


def test_store_under_live_reference_is_a_stack_mismatch():
    text = """.function main 0 1 void
#var 0 x int
#requires true
#ensures true
  LOAD 0
  PUSH 1
  STORE 0
  PRINT
  RET
.end
"""
    with pytest.raises(SymbolicStackMismatch):
        generate_bytecode_obligations(load_module(text))


def test_level_correspondence(corpus_name):
    bc = Counter(o.id for o in generate_bytecode_obligations(compiled(corpus_name)[0]))
    src = Counter(o.id for o in translated_source_obligations(typed(corpus_name)))
    assert bc == src


# -- wp monotonicity -------------------------------------------------------------

_lin = st.tuples(st.integers(-2, 2), st.sampled_from([x, Var("y")]), st.integers(-3, 3)).map(
    lambda t: add(mul(IntLit(t[0]), t[1]), IntLit(t[2])))
_posts = st.tuples(st.sampled_from([le, lt, eq]), _lin, _lin).map(lambda t: t[0](t[1], t[2]))


def _valid(f):
    try:
        return bool(enumerate_validity(f, 2, 2, 2, ceiling=400_000))
    except TooLarge:
        assume(False)


@settings(max_examples=60, deadline=None)
@given(programs(asserts=False, max_size=3), _posts, _posts)
def test_wp_is_monotone(text, p, g):
    tp = typecheck(parse_program(text))
    stmts = tp.info("main").decl.body[3:]      # skip the variable declarations
    post1, post2 = And(p, g), Or(p, g)
    assert _valid(Imp(post1, post2))
    pre1, _ = wp_source(tp, "main", stmts, post1)
    pre2, _ = wp_source(tp, "main", stmts, post2)
    assert _valid(Imp(pre1, pre2))
