import pytest
from hypothesis import given, settings, strategies as st

from lissom.compiler import UnmappedVariable, VarMap, compile_program, translate_formula
from lissom.lang import interpret_source, parse_program, typecheck
from lissom.lang.tologic import spec_formula
from lissom.logic import Forall, Var, canonical_text, children, le
from lissom.vm import run

from helpers import compiled, input_vectors, typed
from strategies import programs


def compile_text(text):
    return compile_program(typecheck(parse_program(text)))


def ops(fn, start=0, end=None):
    return [(i.op, i.arg) for i in fn.code[start:end]]


def test_postorder_lowering():
    m, _ = compile_text("fun main() { var x: int := 0; x := 1 + 2; }")
    assert ops(m.function("main"), 2, 6) == [("PUSH", 1), ("PUSH", 2), ("ADD", None), ("STORE", 0)]


def test_loop_invariant_installed_at_head():
    m, trace = compile_text(
        "fun main() { var i: int := 0; var n: int := 3;"
        " while i < n invariant i <= n { i := i + 1; } }")
    fn = m.function("main")
    (label,) = trace.loops.values()
    assert fn.table.invariants[label] == le(Var("v0"), Var("v1"))
    head = fn.labels[label]
    assert ops(fn, head, head + 4) == [("LOAD", 0), ("LOAD", 1), ("LT", None), ("JZ", ops(fn, head + 3, head + 4)[0][1])]


def test_assert_is_an_annotation_only():
    m, _ = compile_text("fun main() { var x: int := 1; assert x > 0; print x; }")
    fn = m.function("main")
    assert list(fn.table.asserts) == [2]
    assert ops(fn) == [("PUSH", 1), ("STORE", 0), ("LOAD", 0), ("PRINT", None), ("RET", None)]


def test_contracts_renamed_through_varmap():
    fn = compiled("abs")[0].function("abs")
    assert "\\old_v0" in canonical_text(fn.table.ensures).decode()
    assert fn.table.varmap[0] == "v0" and fn.table.sortmap[0] == "int"


def test_translate_renames_variables():
    vm = VarMap({"x": "v0", "n": "v1"})
    assert translate_formula(le(Var("x"), Var("n")), vm) == le(Var("v0"), Var("v1"))
    with pytest.raises(UnmappedVariable):
        translate_formula(le(Var("x"), Var("m")), vm)


def test_old_maps_to_ghost():
    info = typed("abs").info("abs")
    vm = VarMap.of(info)
    assert vm["\\old_x"] == "\\old_" + vm["x"]


def _leaf_diff(a, b, bound=frozenset()):
    """Assert ``a`` and ``b`` differ only in free variable names."""
    assert type(a) is type(b)
    if isinstance(a, Var):
        if a.name in bound:
            assert a == b
        else:
            assert a.sort == b.sort
        return
    if isinstance(a, Forall):
        assert a.var == b.var
        _leaf_diff(a.body, b.body, bound | {a.var})
        return
    ka, kb = children(a), children(b)
    assert len(ka) == len(kb)
    if not ka:
        assert a == b
    for x, y in zip(ka, kb):
        _leaf_diff(x, y, bound)


def test_translation_changes_only_leaves(corpus_name):
    tp = typed(corpus_name)
    from lissom.lang import ast as A

    for info in tp.functions.values():
        vm = VarMap.of(info)
        d = info.decl
        anns = list(d.requires) + list(d.ensures)
        anns += [s.invariant for s in A.walk_stmts(d.body) if isinstance(s, A.While)]
        anns += [s.formula for s in A.walk_stmts(d.body) if isinstance(s, A.Assert)]
        for ann in anns:
            f = spec_formula(ann)
            _leaf_diff(f, translate_formula(f, vm))


def test_trace_covers_every_instruction_once(corpus_name):
    module, trace = compiled(corpus_name)
    for fn in module.functions:
        owned = [pc for e in trace.entries if e.function == fn.name
                 for lo, hi in e.spans for pc in range(lo, hi)]
        assert sorted(owned) == list(range(len(fn.code)))
    for (fname, _, _), label in trace.loops.items():
        assert label in module.function(fname).table.invariants


def test_compiler_is_deterministic(corpus_name):
    from lissom.vm import encode_module

    tp = typed(corpus_name)
    assert encode_module(compile_program(tp)[0]) == encode_module(compile_program(tp)[0])


def _same(a, b):
    return a.outputs == b.outputs and getattr(a, "kind", None) == getattr(b, "kind", None)


def test_differential_on_sum_inputs():
    tp, (m, _) = typed("sum"), compiled("sum")
    for inputs in input_vectors(1):
        assert _same(interpret_source(tp, inputs), run(m, inputs=inputs))


@settings(max_examples=150, deadline=None)
@given(programs(asserts=False), st.lists(st.integers(-3, 3), max_size=5))
def test_random_programs_agree_with_interpreter(text, inputs):
    tp = typecheck(parse_program(text))
    m, _ = compile_program(tp)
    src, vm = interpret_source(tp, inputs, fuel=20_000), run(m, inputs=inputs, fuel=200_000)
    assert _same(src, vm), (src, vm)
