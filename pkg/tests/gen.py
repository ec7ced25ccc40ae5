"""Seeded random generators for goals and certificates (acceptance fuzzing)."""

import random

from lissom.logic import (
    FALSE, TRUE, And, Atom, BinOp, Forall, Imp, IntLit, Not, Or, Var, conj, le, lt, eq,
)

VARS = [Var(n) for n in ("a", "b", "c", "d")]


class LinearGoals:
    """Goals over at most four integer variables with coefficients in [-5, 5]."""

    def __init__(self, seed):
        self.r = random.Random(seed)

    def lin(self, names):
        r = self.r
        t = IntLit(r.randint(-5, 5))
        for v in r.sample(names, r.randint(1, len(names))):
            c = r.randint(-5, 5)
            if c:
                t = BinOp("add", BinOp("mul", IntLit(c), v), t)
        return t

    def atom(self, names):
        op = self.r.choice([le, lt, eq])
        return op(self.lin(names), self.lin(names))

    def goal(self):
        r = self.r
        names = VARS[:r.randint(1, 4)]
        hyps = [self.atom(names) for _ in range(r.randint(0, 3))]
        shape = r.random()
        if shape < 0.5 and hyps:
            concl = self._implied(hyps, names)
        elif shape < 0.75:
            concl = Or(self.atom(names), self.atom(names))
        else:
            concl = self.atom(names)
        return Imp(conj(hyps), concl) if hyps else concl

    def _implied(self, hyps, names):
        """A conclusion that is often (not always) a consequence of ``hyps``."""
        r = self.r
        h = r.choice(hyps)
        slack = IntLit(r.randint(0, 3))
        if isinstance(h, Atom) and h.op in ("le", "lt"):
            return le(h.left, BinOp("add", h.right, slack))
        return self.atom(names)


def random_formula(r, names, depth=3):
    if depth == 0 or r.random() < 0.3:
        k = r.random()
        if k < 0.05:
            return TRUE if r.random() < 0.5 else FALSE
        a, b = r.choice(names), IntLit(r.randint(-3, 3))
        return r.choice([le, lt, eq])(a, BinOp("add", r.choice(names), b) if r.random() < 0.5 else b)
    k = r.randrange(5)
    if k == 0:
        return Not(random_formula(r, names, depth - 1))
    if k == 1:
        return And(random_formula(r, names, depth - 1), random_formula(r, names, depth - 1))
    if k == 2:
        return Or(random_formula(r, names, depth - 1), random_formula(r, names, depth - 1))
    if k == 3:
        return Imp(random_formula(r, names, depth - 1), random_formula(r, names, depth - 1))
    q = f"q{depth}x"
    return Forall(q, random_formula(r, names + [Var(q)], depth - 1))


# -- certificate fuzzing -----------------------------------------------------------

def perturb(r, f):
    """A small random edit of ``f``: a literal moved by one, a comparison
    weakened or strengthened, or a subformula negated."""
    from lissom.logic import children, rebuild, sort_of

    nodes = []

    def walk(n, path):
        nodes.append(path)
        for k, c in enumerate(children(n)):
            walk(c, path + (k,))

    walk(f, ())
    path = r.choice(nodes)

    def edit(n):
        if isinstance(n, IntLit):
            return IntLit(n.value + r.choice([-1, 1]))
        if isinstance(n, Atom) and n.op in ("le", "lt", "eq") and sort_of(n.left) == "int":
            return Atom(r.choice([o for o in ("le", "lt", "eq") if o != n.op]), n.left, n.right)
        if isinstance(n, (Atom, And, Or, Imp, Not, Forall)):
            return Not(n)
        return n

    def go(n, path):
        if not path:
            return edit(n)
        kids = list(children(n))
        kids[path[0]] = go(kids[path[0]], path[1:])
        return rebuild(n, kids)

    return go(f, path)


def cert_nodes(c):
    import dataclasses

    from lissom.proof.cert import Cert

    out = [c]
    for fld in dataclasses.fields(c):
        v = getattr(c, fld.name)
        if isinstance(v, Cert):
            out += cert_nodes(v)
        elif isinstance(v, tuple):
            for x in v:
                if isinstance(x, Cert):
                    out += cert_nodes(x)
    return out


def mutate_cert(r, c, formulas, terms):
    """Replace one node of certificate ``c`` by a plausible variant."""
    import dataclasses
    from fractions import Fraction

    from lissom.proof import cert as P

    target = r.choice(cert_nodes(c))

    def variant(n):
        if isinstance(n, P.Hyp):
            return P.Hyp(max(0, n.index + r.choice([-1, 1])))
        if isinstance(n, P.Lia) and n.coeffs:
            k = r.randrange(len(n.coeffs))
            cs = list(n.coeffs)
            cs[k] = Fraction(cs[k]) + r.choice([Fraction(-1), Fraction(1), Fraction(1, 2)])
            return dataclasses.replace(n, coeffs=tuple(cs))
        if isinstance(n, P.ForallE) and terms:
            return dataclasses.replace(n, witness=r.choice(terms))
        if isinstance(n, (P.ImpI, P.NotI)) and formulas:
            fld = "antecedent" if isinstance(n, P.ImpI) else "formula"
            return dataclasses.replace(n, **{fld: r.choice(formulas)})
        if isinstance(n, P.Eval) and formulas:
            return P.Eval(r.choice(formulas))
        if isinstance(n, P.Axiom) and len(n.inst) > 1:
            inst = list(n.inst)
            r.shuffle(inst)
            names = [k for k, _ in n.inst]
            return dataclasses.replace(n, inst=tuple(zip(names, [t for _, t in inst])))
        if isinstance(n, (P.AndE1, P.AndE2)):
            return (P.AndE2 if isinstance(n, P.AndE1) else P.AndE1)(n.of)
        return P.Contra(n)

    def go(n):
        if n is target:
            return variant(n)
        kw = {}
        for fld in dataclasses.fields(n):
            v = getattr(n, fld.name)
            if isinstance(v, P.Cert):
                kw[fld.name] = go(v)
            elif isinstance(v, tuple) and v and isinstance(v[0], P.Cert):
                kw[fld.name] = tuple(go(x) for x in v)
        return dataclasses.replace(n, **kw) if kw else n

    return go(c)


def random_cert(r, formulas, terms, names, depth=4):
    """An arbitrary derivation tree built from pieces of a goal."""
    from fractions import Fraction

    from lissom.proof import cert as P
    from lissom.proof.axioms import CATALOG, METAVARS

    f = lambda: r.choice(formulas)  # noqa: E731
    t = lambda: r.choice(terms)  # noqa: E731
    if depth == 0:
        k = r.randrange(5)
        if k == 0:
            return P.Hyp(r.randrange(3))
        if k == 1:
            return P.Refl(t())
        if k == 2:
            return P.Eval(f())
        if k == 3:
            schema = r.choice(sorted(CATALOG))
            inst = tuple((m, t()) for m, s in sorted(METAVARS[schema].items()) if s == "int")
            return P.Axiom(schema, inst)
        n = r.randint(1, 3)
        return P.Lia(tuple(Fraction(r.randint(-1, 3), r.choice([1, 1, 2])) for _ in range(n)),
                     tuple(P.Hyp(r.randrange(3)) for _ in range(n)))
    sub = lambda: random_cert(r, formulas, terms, names, depth - 1)  # noqa: E731
    k = r.randrange(13)
    return [
        lambda: P.AndI(sub(), sub()),
        lambda: P.AndE1(sub()),
        lambda: P.AndE2(sub()),
        lambda: P.OrI1(sub(), f()),
        lambda: P.OrI2(sub(), f()),
        lambda: P.OrE(sub(), sub(), sub()),
        lambda: P.ImpI(f(), sub()),
        lambda: P.ImpE(sub(), sub()),
        lambda: P.NotI(f(), sub()),
        lambda: P.Contra(sub()),
        lambda: P.ForallI(r.choice(names), sub()),
        lambda: P.ForallE(sub(), t()),
        lambda: P.Rewrite(sub(), sub(), tuple(sorted(r.sample(range(4), r.randint(0, 2))))),
    ][k]()


def pieces(goal):
    """Subformulas, integer subterms and variable names of ``goal``."""
    from lissom.logic import Formula, Term, free_vars, sort_of, subterms

    fs, ts = [], []
    for n in subterms(goal):
        if isinstance(n, Formula):
            fs.append(n)
        elif isinstance(n, Term) and sort_of(n) == "int":
            ts.append(n)
    names = sorted(free_vars(goal)) or ["x"]
    return fs or [TRUE], ts or [IntLit(0)], names
