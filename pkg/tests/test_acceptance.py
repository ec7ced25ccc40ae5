"""Acceptance criteria 1-6.

Every criterion prints exactly one ``PASS``/``FAIL`` line.  Run with
``pytest tests/test_acceptance.py`` or directly as
``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lissom.bundle import verify_bundle  # noqa: E402
from lissom.lang import interpret_source  # noqa: E402
from lissom.logic import CounterModel, TooLarge, enumerate_validity, free_vars  # noqa: E402
from lissom.producer import translated_source_obligations  # noqa: E402
from lissom.proof import cert_text, check_certificate, parse_certificate  # noqa: E402
from lissom.proof.prover import GiveUp, prove  # noqa: E402
from lissom.vm import run  # noqa: E402

import gen  # noqa: E402
from helpers import (  # noqa: E402
    PRODUCER_SIDE, built, corpus, input_vectors, loaded, run_isolated, typed,
)
from tamper import MUTATIONS  # noqa: E402

REQUIRED = {
    "sum": "sum loop", "vmax": "vector max", "reverse": "vector reverse",
    "search": "linear search", "gcd": "gcd", "unionsize": "set union cardinality",
    "countin": "membership filter", "abs": "abs", "clamp": "clamp", "divide": "guarded division",
}
GUARDED = {"DivByZero", "OutOfBounds"}


# -- criteria ----------------------------------------------------------------------

def criterion_1():
    """Corpus builds, verifies, and the VM agrees with the source interpreter."""
    t0 = time.perf_counter()
    missing = sorted(set(REQUIRED) - set(corpus()))
    rejected, mismatches, runs = [], 0, 0
    for name, (_, max_inputs) in corpus().items():
        bundle, module, _, _ = built(name)
        if not verify_bundle(bundle.to_bytes()):
            rejected.append(name)
        tp = typed(name)
        for inputs in input_vectors(max_inputs):
            a, b = interpret_source(tp, inputs), run(module, inputs=inputs)
            runs += 1
            if (a.outputs, getattr(a, "kind", None)) != (b.outputs, getattr(b, "kind", None)):
                mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = len(corpus()) >= 10 and not missing and not rejected and not mismatches and elapsed < 120
    return ok, (f"{len(corpus())} programs, {len(corpus()) - len(rejected)} accepted, "
                f"{runs} differential runs, {mismatches} mismatches, {elapsed:.1f}s"
                + (f", missing {missing}" if missing else ""))


def criterion_2():
    """Every obligation is oracle-valid and exhaustive runs never misbehave."""
    invalid, checked, bad_runs, runs = [], 0, [], 0
    for name, (_, max_inputs) in corpus().items():
        _, module, _, obligations = built(name)
        for oid, o in {o.id: o for o in obligations}.items():
            checked += 1
            if not enumerate_validity(o.formula, 3, 3, 3):
                invalid.append((name, o.site, o.location))
        for inputs in input_vectors(max_inputs):
            out = run(module, inputs=inputs, spec_monitor=True)
            runs += 1
            kind = getattr(out, "kind", None)
            if kind is not None and kind != "InputExhausted":
                bad_runs.append((name, inputs, kind))
    ok = not invalid and not bad_runs
    return ok, (f"{checked} obligations valid at bound 3 ({len(invalid)} invalid); "
                f"{runs} monitored runs, {len(bad_runs)} guarded traps or contract violations")


def criterion_3():
    """Bytecode obligations equal translated source obligations as multisets."""
    diffs = {}
    total = 0
    for name in corpus():
        bc = Counter(o.id for o in built(name)[3])
        src = Counter(o.id for o in translated_source_obligations(typed(name)))
        total += sum(bc.values())
        if bc != src:
            diffs[name] = sum(((bc - src) + (src - bc)).values())
    return not diffs, f"{total} obligations across {len(corpus())} programs, mismatches: {diffs or 0}"


def criterion_4():
    """Curated mutations and random byte corruption are all rejected."""
    curated_accepted = [m.name for m in MUTATIONS if verify_bundle(m.apply())]
    r = random.Random(4)
    names = list(corpus())
    accepted = crashes = 0
    for _ in range(1000):
        data = bytearray(built(r.choice(names))[0].to_bytes())
        pos = r.randrange(len(data))
        data[pos] = (data[pos] + r.randint(1, 255)) % 256
        try:
            accepted += bool(verify_bundle(bytes(data)))
        except Exception:
            crashes += 1
    ok = len(MUTATIONS) >= 20 and not curated_accepted and not accepted and not crashes
    return ok, (f"{len(MUTATIONS)} curated mutations, {len(curated_accepted)} accepted; "
                f"1000 random corruptions, {accepted} accepted, {crashes} crashes")


def _counter_model(f):
    try:
        return isinstance(enumerate_validity(f, 2, 2, 2, ceiling=200_000), CounterModel)
    except TooLarge:
        return False


def fuzz_pairs(n=1000, seed=5):
    """``n`` (goal, certificate) pairs whose goals all have a counter-model."""
    r = random.Random(seed)
    pool = []
    for name in corpus():
        bundle, _, _, obligations = built(name)
        for o in obligations:
            pool.append((o.formula, parse_certificate(bundle.certs[o.id], env=free_vars(o.formula))))
    lin = gen.LinearGoals(seed)
    while len(pool) < 200:
        g = lin.goal()
        c = prove(g)
        if not isinstance(c, GiveUp):
            pool.append((g, c))
    pairs = []
    while len(pairs) < n:
        kind = len(pairs) % 3
        if kind == 0:
            names = gen.VARS[:r.randint(1, 3)]
            goal = gen.random_formula(r, names)
            if not _counter_model(goal):
                continue
            fs, ts, vs = gen.pieces(goal)
            pairs.append((goal, gen.random_cert(r, fs, ts, vs)))
            continue
        goal, cert = r.choice(pool)
        bad = gen.perturb(r, goal)
        if not _counter_model(bad):
            continue
        if kind == 2:
            fs, ts, _ = gen.pieces(bad)
            cert = gen.mutate_cert(r, cert, fs, ts)
        pairs.append((bad, cert))
    return pairs


def criterion_5():
    """Fuzzed certificates never pass; prover certificates always do; the
    checker does not depend on producer-side code."""
    accepted = crashes = parsed = 0
    for goal, cert in fuzz_pairs():
        try:
            accepted += bool(check_certificate(goal, cert))
            try:
                again = parse_certificate(cert_text(cert), env=free_vars(goal))
            except Exception:
                continue
            parsed += 1
            accepted += bool(check_certificate(goal, again))
        except Exception:
            crashes += 1
    emitted = closed = 0
    for name in corpus():
        bundle, _, _, obligations = built(name)
        for o in {o.id: o for o in obligations}.values():
            emitted += 1
            closed += bool(check_certificate(
                o.formula, parse_certificate(bundle.certs[o.id], env=free_vars(o.formula))))
    lin = gen.LinearGoals(55)
    for _ in range(200):
        g = lin.goal()
        c = prove(g)
        if not isinstance(c, GiveUp):
            emitted += 1
            closed += bool(check_certificate(g, c))
    banned = PRODUCER_SIDE + ["lissom.vcgen", "lissom.vm", "lissom.bundle"]
    dep = run_isolated(banned, f"""
        import json
        import lissom.proof.checker
        print(json.dumps({loaded(banned)}))
    """)
    ok = not accepted and not crashes and closed == emitted and dep == []
    return ok, (f"1000 fuzzed certificates ({parsed} also re-parsed): {accepted} accepted, "
                f"{crashes} crashes; prover certificates {closed}/{emitted} accepted; "
                f"checker imports of producer code: {len(dep)}")


def criterion_6():
    """Whatever the prover certifies on random linear goals is valid at bound 6."""
    lin = gen.LinearGoals(6)
    certified, unsound = 0, []
    for _ in range(500):
        g = lin.goal()
        c = prove(g)
        if isinstance(c, GiveUp):
            continue
        certified += 1
        if not check_certificate(g, c) or not enumerate_validity(g, 6):
            unsound.append(g)
    return not unsound, (f"500 goals, {certified} certified, {len(unsound)} certified but "
                         f"falsifiable at bound 6")


CRITERIA = [
    (1, "end-to-end corpus", criterion_1),
    (2, "soundness sweep", criterion_2),
    (3, "level correspondence", criterion_3),
    (4, "tamper suite", criterion_4),
    (5, "checker integrity", criterion_5),
    (6, "prover soundness spot-check", criterion_6),
]


def evaluate(number, title, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({title}): {detail}"
    return ok, line


# -- pytest entry points -------------------------------------------------------------

@pytest.fixture
def announce(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(line):
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)

    return emit


@pytest.mark.slow
@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, announce):
    ok, line = evaluate(number, title, fn)
    announce(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line, flush=True)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
