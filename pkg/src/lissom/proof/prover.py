"""Automatic, untrusted certificate producer.

Goals are first broken up by introduction rules.  Remaining atomic goals
are proved by refutation: the negated goal joins the hypotheses, which are
saturated (conjunction splitting, axiom instances for the terms present,
trigger-based quantifier instantiation, equality propagation) and closed
by literal clashes or Farkas combinations found by Fourier-Motzkin.
Disjunctions and undecided implication antecedents are case-split.

Hypothesis bookkeeping: the refutation context only ever grows.  A proof
that opens its own hypotheses is valid only at the context length it was
built for, and check-only rules (contra, lia, rewrite) cannot serve as
premises, so such proofs are cut immediately:
``ImpE(ImpI(f, rest), proof)``.  Everything stored is then either a
hypothesis reference or a context-free derivation.

Every certificate returned has been accepted by the checker.
"""

import dataclasses
import time
from dataclasses import dataclass

from ..logic.arith import ONE, atom_key, linear_form, poly
from ..logic.canon import to_text
from ..logic.semantics import EvalError, NonGround, eval_ground
from ..logic.syntax import (
    FALSE, INT, And, Atom, BinOp, Card, FalseF, Forall, Formula, Idx, Imp,
    IntLit, Len, NewVec, Not, Or, SetLit, TrueF, Upd, Var, children,
    free_vars, is_quantifier_free, rebuild, sort_of, sub, substitute,
)
from . import axioms, fm
from .cert import (
    AndE1, AndE2, AndI, Axiom, Cert, Contra, Eval, ForallE, ForallI, Hyp,
    ImpE, ImpI, Lia, NotI, OrE, OrI1, OrI2, Refl, Rewrite,
)
from .checker import check_certificate

DEFAULT_BUDGET_MS = 5000
MAX_INSTANCES = 60
MAX_SPLIT_DEPTH = 12


@dataclass(frozen=True)
class GiveUp:
    residual: tuple
    reason: str = ""

    def __bool__(self):
        return False


class _OutOfBudget(Exception):
    pass


def prove(goal, budget_ms=DEFAULT_BUDGET_MS):
    """Certificate for ``goal`` or ``GiveUp`` listing unproven leaves."""
    p = _Prover(budget_ms)
    try:
        cert = p.intro((), goal)
    except _OutOfBudget:
        return GiveUp(tuple(p.residual) or (to_text(goal),), "budget exhausted")
    except RecursionError:
        return GiveUp((to_text(goal),), "derivation too deep")
    if cert is None:
        return GiveUp(tuple(p.residual) or (to_text(goal),), "no proof found")
    verdict = check_certificate(goal, cert)
    if not verdict.ok:
        return GiveUp((to_text(goal),), f"internal: checker rejected ({verdict.reason} at {verdict.path})")
    return cert


def em(f, n):
    """Derivation of ``f or not f`` in a context of length ``n``."""
    disj = Or(f, Not(f))
    inner = NotI(f, ImpE(Hyp(n), OrI1(Hyp(n + 1), Not(f))))
    return Contra(NotI(Not(disj), ImpE(Hyp(n), OrI2(inner, f))))


# nodes that open hypotheses, or whose conclusion cannot be synthesized
_OPEN = (ImpI, NotI, OrE, ForallI, Contra, Lia, Rewrite)


def closed(c):
    """True if ``c`` can be reused verbatim anywhere later in the context."""
    stack = [c]
    while stack:
        x = stack.pop()
        if isinstance(x, _OPEN):
            return False
        for fld in dataclasses.fields(x):
            v = getattr(x, fld.name)
            if isinstance(v, Cert):
                stack.append(v)
            elif isinstance(v, tuple):
                stack.extend(p for p in v if isinstance(p, Cert))
    return True


def _key(f):
    return to_text(f)


def _neg(f):
    return f.arg if isinstance(f, Not) else Not(f)


def _conjuncts(f):
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _rebuild_and(ante, proofs):
    it = iter(proofs)

    def go(f):
        if isinstance(f, And):
            return AndI(go(f.left), go(f.right))
        return next(it)
    return go(ante)


def _conj_all(fs):
    fs = list(fs)
    if not fs:
        return TrueF()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def _ground_terms(f, out):
    """Terms of ``f`` not under a quantifier, preorder."""
    if isinstance(f, Forall):
        return
    if not isinstance(f, Formula):
        out.append(f)
    for k in children(f):
        _ground_terms(k, out)


def _ground_mems(f, out):
    if isinstance(f, Forall):
        return
    if isinstance(f, Atom) and f.op == "mem":
        out.append((f.left, f.right))
        return
    for k in children(f):
        if isinstance(k, Formula):
            _ground_mems(k, out)


def _int_atoms(t, out):
    if isinstance(t, IntLit):
        return
    if isinstance(t, BinOp) and t.op in ("add", "sub", "mul"):
        _int_atoms(t.left, out)
        _int_atoms(t.right, out)
        return
    out.setdefault(atom_key(t), t)


def _triggers(f, q, out):
    """Patterns ``idx(V, q + c)`` and ``mem(q + c, S)`` with V, S free of q."""
    if isinstance(f, Forall):
        if f.var != q:
            _triggers(f.body, q, out)
        return
    if isinstance(f, Idx):
        off = _offset(f.index, q)
        if off is not None and q not in free_vars(f.vec):
            out.append(("idx", f.vec, off))
    if isinstance(f, Atom) and f.op == "mem":
        off = _offset(f.left, q)
        if off is not None and q not in free_vars(f.right):
            out.append(("mem", f.right, off))
    for k in children(f):
        _triggers(k, q, out)


def _offset(t, q):
    p = poly(t)
    if p.get((q,), 0) != 1 or set(p) - {(q,), ONE}:
        return None
    return p.get(ONE, 0)


def _contains(t, s):
    return t == s or any(_contains(k, s) for k in children(t))


def _count(t, s):
    if t == s:
        return 1
    return sum(_count(k, s) for k in children(t))


def _replace_tracking(f, a, b):
    """Replace ``a`` by ``b``; also return which occurrences of ``b`` in the
    result came from ``a`` (preorder numbering, as the checker counts)."""
    counter = [0]
    positions = []

    def go(node):
        if node == a:
            positions.append(counter[0])
            counter[0] += 1
            return b
        if node == b:
            counter[0] += 1
            return node
        kids = children(node)
        return rebuild(node, [go(k) for k in kids]) if kids else node

    return go(f), positions


_SETOP_MEM = {"union": "mem_union", "inter": "mem_inter", "diff": "mem_diff"}
_SETOP_CARD = {"union": "card_union_le", "inter": "card_inter_le", "diff": "card_diff_le"}


def _lit_inst(x, s):
    inst = (("x", x),) + tuple((f"e{m + 1}", e) for m, e in enumerate(s.elems))
    return f"mem_lit{len(s.elems)}", inst


class _State:
    def __init__(self):
        self.ctx = []
        self.frames = []
        self.known = {}          # text -> cert
        self.facts = []          # (formula, cert), decomposition order
        self.proved = {}         # text -> cert for facts found by status checks
        self.linear = []         # (poly, kind, cert)
        self.pending = []        # (formula, cert)
        self.branches = []       # (kind, formula, cert)
        self.split_done = set()
        self.imps = []           # [ante, concl, cert, status, nand]
        self.foralls = []        # (formula, cert)
        self.used_witness = set()
        self.terms_done = set()
        self.eq_done = set()
        self.instances = 0
        self.cache = {}

    def fork(self):
        s = _State()
        s.ctx = list(self.ctx)
        s.known = dict(self.known)
        s.facts = list(self.facts)
        s.proved = dict(self.proved)
        s.linear = list(self.linear)
        s.pending = list(self.pending)
        s.branches = list(self.branches)
        s.split_done = set(self.split_done)
        s.imps = [list(i) for i in self.imps]
        s.foralls = list(self.foralls)
        s.used_witness = set(self.used_witness)
        s.terms_done = set(self.terms_done)
        s.eq_done = set(self.eq_done)
        s.instances = self.instances
        return s

    def hyp(self, f):
        self.ctx.append(f)
        c = Hyp(len(self.ctx) - 1)
        self.pending.append((f, c))
        return c

    def cut(self, f, proof):
        self.frames.append((f, proof))
        return self.hyp(f)

    def add(self, f, c):
        """Queue fact ``f``; returns a reference valid from now on."""
        k = _key(f)
        if k in self.known:
            return self.known[k]
        if k in self.proved:
            return self.proved[k]
        if closed(c):
            self.pending.append((f, c))
            self.proved[k] = c
            return c
        h = self.cut(f, c)
        self.proved[k] = h
        return h


def _wrap(frames, close):
    for f, proof in reversed(frames):
        close = ImpE(ImpI(f, close), proof)
    return close


class _Prover:
    def __init__(self, budget_ms):
        self.deadline = time.monotonic() + budget_ms / 1000.0
        self.residual = []

    def tick(self):
        if time.monotonic() > self.deadline:
            raise _OutOfBudget()

    # -- introduction phase ----------------------------------------------

    def intro(self, ctx, goal):
        self.tick()
        if isinstance(goal, TrueF):
            return Eval(goal)
        for i, h in enumerate(ctx):
            if h == goal:
                return Hyp(i)
        if isinstance(goal, And):
            a = self.intro(ctx, goal.left)
            if a is None:
                return None
            b = self.intro(ctx, goal.right)
            return None if b is None else AndI(a, b)
        if isinstance(goal, Imp):
            b = self.intro(ctx + (goal.left,), goal.right)
            return None if b is None else ImpI(goal.left, b)
        if isinstance(goal, Forall):
            taken = set(free_vars(goal))
            for h in ctx:
                taken |= set(free_vars(h))
            x = goal.var
            while x in taken:
                x += "'"
            b = self.intro(ctx, substitute(goal.body, goal.var, Var(x, INT)))
            return None if b is None else ForallI(x, b)
        if isinstance(goal, Not):
            b = self.refute_ctx(ctx + (goal.arg,), goal)
            return None if b is None else NotI(goal.arg, b)
        if isinstance(goal, Atom) and goal.op == "subset":
            inst = (("A", goal.left), ("B", goal.right))
            ax = axioms.instantiate("subset_def", inst)
            body = self.intro(ctx, ax.right.left)
            return None if body is None else ImpE(AndE2(Axiom("subset_def", inst)), body)
        b = self.refute_ctx(ctx + (Not(goal),), goal)
        return None if b is None else Contra(NotI(Not(goal), b))

    def refute_ctx(self, ctx, goal):
        st = _State()
        for f in ctx:
            st.hyp(f)
        close = self.refute(st, 0)
        if close is None:
            self.residual.append(to_text(Imp(_conj_all(ctx[:-1]), goal)) if len(ctx) > 1 else to_text(goal))
        return close

    # -- refutation -------------------------------------------------------

    def refute(self, st, depth):
        close = self.saturate(st)
        if close is None:
            if depth >= MAX_SPLIT_DEPTH:
                return None
            close = self.split(st, depth)
            if close is None:
                return None
        return _wrap(st.frames, close)

    def split(self, st, depth):
        cand = self.pick(st)
        if cand is None:
            return None
        kind, f, c = cand
        if kind == "em":
            disj = Or(f, Not(f))
            c = st.cut(disj, em(f, len(st.ctx)))
            st.pending.pop()  # split right away instead of queueing
            st.known[_key(disj)] = c
            f = disj
        left = st.fork()
        left.hyp(f.left)
        right = st.fork()
        right.hyp(f.right)
        cl = self.refute(left, depth + 1)
        if cl is None:
            return None
        cr = self.refute(right, depth + 1)
        if cr is None:
            return None
        return OrE(c, cl, cr)

    def pick(self, st):
        while st.branches:
            kind, f, c = st.branches.pop(0)
            k = _key(f)
            if k in st.split_done:
                continue
            st.split_done.add(k)
            if kind == "or":
                if self.status(st, f.left)[0] == "proven" or self.status(st, f.right)[0] == "proven":
                    continue
                return ("or", f, c)
            if self.status(st, f)[0] != "unknown":
                continue
            return ("em", f, None)
        for item in st.imps:
            if item[3] != "open":
                continue
            for conj in _conjuncts(item[0]):
                k = _key(conj)
                if k in st.split_done:
                    continue
                if self.status(st, conj)[0] == "unknown":
                    st.split_done.add(k)
                    return ("em", conj, None)
        return None

    def saturate(self, st):
        while True:
            self.tick()
            while st.pending:
                f, c = st.pending.pop(0)
                r = self.decompose(st, f, c)
                if r is not None:
                    return r
            r = self.lia_false(st)
            if r is not None:
                return r
            if self.theory(st) or self.fire(st) or self.equalities(st) or self.instantiate(st):
                continue
            if st.pending:
                continue
            return None

    def decompose(self, st, f, c):
        k = _key(f)
        if k in st.known:
            return None
        st.known[k] = c
        st.facts.append((f, c))
        st.cache.clear()
        nk = _key(_neg(f))
        if nk in st.known:
            other = st.known[nk]
            return ImpE(c, other) if isinstance(f, Not) else ImpE(other, c)
        if isinstance(f, FalseF):
            return c
        if isinstance(f, And):
            st.pending.append((f.left, AndE1(c)))
            st.pending.append((f.right, AndE2(c)))
        elif isinstance(f, Or):
            st.branches.append(("or", f, c))
        elif isinstance(f, Imp):
            st.imps.append([f.left, f.right, c, "open", None])
        elif isinstance(f, Forall):
            st.foralls.append((f, c))
        elif isinstance(f, Atom):
            self.atom_fact(st, f, c)
        elif isinstance(f, Not):
            self.neg_fact(st, f, c)
        return None

    def atom_fact(self, st, f, c):
        lf = linear_form(f)
        if lf is not None:
            st.linear.append((lf[0], lf[1], c))
            return
        if f.op == "mem":
            x, s = f.left, f.right
            if isinstance(s, BinOp):
                sid = _SETOP_MEM[s.op]
                inst = (("x", x), ("A", s.left), ("B", s.right))
            elif isinstance(s, SetLit) and len(s.elems) <= axioms.MAX_LIT:
                sid, inst = _lit_inst(x, s)
                if not s.elems:
                    st.pending.append((FALSE, ImpE(Axiom(sid, inst), c)))
                    return
            else:
                return
            rhs = axioms.instantiate(sid, inst).left.right
            st.pending.append((rhs, ImpE(AndE1(Axiom(sid, inst)), c)))
        elif f.op == "subset":
            inst = (("A", f.left), ("B", f.right))
            ax = axioms.instantiate("subset_def", inst)
            st.pending.append((ax.left.right, ImpE(AndE1(Axiom("subset_def", inst)), c)))
            card = axioms.instantiate("card_subset_le", inst)
            st.pending.append((card.right, ImpE(Axiom("card_subset_le", inst), c)))

    def neg_fact(self, st, f, c):
        g = f.arg
        if isinstance(g, Not):
            st.add(g.arg, Contra(c))
        elif isinstance(g, Or):
            n = len(st.ctx)
            st.add(Not(g.left), NotI(g.left, ImpE(c, OrI1(Hyp(n), g.right))))
            n = len(st.ctx)
            st.add(Not(g.right), NotI(g.right, ImpE(c, OrI2(Hyp(n), g.left))))
        elif isinstance(g, Imp):
            m = len(st.ctx)
            st.add(Not(g.right), NotI(g.right, ImpE(c, ImpI(g.left, Hyp(m)))))
            m = len(st.ctx)
            exfalso = Contra(NotI(Not(g.right), ImpE(Hyp(m), Hyp(m + 1))))
            st.add(g.left, Contra(NotI(Not(g.left), ImpE(c, ImpI(g.left, exfalso)))))
        elif isinstance(g, And):
            # not (A and B): once A holds, not B follows
            st.imps.append([g.left, Not(g.right), c, "open", g])
            st.branches.append(("em", g.left, None))
        elif isinstance(g, Atom):
            lf = linear_form(f)
            if lf is not None:
                st.linear.append((lf[0], lf[1], c))
            elif g.op == "eq" and sort_of(g.left) == INT:
                inst = (("a", g.left), ("b", g.right))
                st.pending.append((axioms.instantiate("ne_split", inst).right, ImpE(Axiom("ne_split", inst), c)))
            elif g.op == "mem":
                self.neg_mem(st, g, c)
            elif g.op == "subset":
                inst = (("A", g.left), ("B", g.right))
                ax = axioms.instantiate("subset_def", inst)
                rhs = ax.right.left  # the quantified form
                n = len(st.ctx)
                st.add(Not(rhs), NotI(rhs, ImpE(c, ImpE(AndE2(Axiom("subset_def", inst)), Hyp(n)))))

    def neg_mem(self, st, g, c):
        x, s = g.left, g.right
        if isinstance(s, BinOp):
            sid = _SETOP_MEM[s.op]
            inst = (("x", x), ("A", s.left), ("B", s.right))
        elif isinstance(s, SetLit) and 0 < len(s.elems) <= axioms.MAX_LIT:
            sid, inst = _lit_inst(x, s)
        else:
            return
        rhs = axioms.instantiate(sid, inst).left.right
        n = len(st.ctx)
        st.add(Not(rhs), NotI(rhs, ImpE(c, ImpE(AndE2(Axiom(sid, inst)), Hyp(n)))))

    # -- linear arithmetic ------------------------------------------------

    def lia_false(self, st):
        origin = fm.refute([(p, k, i) for i, (p, k, _) in enumerate(st.linear)], deadline_check=self.tick)
        if origin is None:
            return None
        tags = sorted(origin)
        return Lia(tuple(origin[t] for t in tags), tuple(st.linear[t][2] for t in tags))

    def lia_with(self, st, extra, n):
        """Lia deriving False from the linear facts plus ``extra`` at Hyp(n)."""
        lf = linear_form(extra)
        if lf is None:
            return None
        rows = [(p, k, i) for i, (p, k, _) in enumerate(st.linear)]
        base = len(rows)
        rows.append((lf[0], lf[1], base))
        origin = fm.refute(rows, deadline_check=self.tick)
        if origin is None:
            return None
        tags = sorted(origin)
        prem = tuple(st.linear[t][2] if t < base else Hyp(n) for t in tags)
        return Lia(tuple(origin[t] for t in tags), prem)

    def prove_atom(self, st, f):
        """Reference to a proof of ``f`` from the current facts, or None."""
        k = _key(f)
        if k in st.known:
            return st.known[k]
        if k in st.proved:
            return st.proved[k]
        if k in st.cache:
            return None
        pr = self._prove_atom(st, f)
        if pr is None:
            st.cache[k] = None
            return None
        return st.add(f, pr)

    def _prove_atom(self, st, f):
        if isinstance(f, TrueF):
            return Eval(f)
        if not free_vars(f) and is_quantifier_free(f):
            try:
                if eval_ground(f) is True:
                    return Eval(f)
            except (EvalError, NonGround):
                pass
        n = len(st.ctx)
        if isinstance(f, Atom) and f.op == "eq" and sort_of(f.left) == INT:
            if f.left == f.right:
                return Refl(f.left)
            a, b = f.left, f.right
            l1 = self.lia_with(st, Atom("lt", a, b), n + 1)
            if l1 is None:
                return None
            l2 = self.lia_with(st, Atom("lt", b, a), n + 1)
            if l2 is None:
                return None
            inst = (("a", a), ("b", b))
            return Contra(NotI(Not(f), OrE(ImpE(Axiom("ne_split", inst), Hyp(n)), l1, l2)))
        if isinstance(f, Not) and isinstance(f.arg, Atom) and f.arg.op == "eq" and sort_of(f.arg.left) == INT:
            body = self.lia_with(st, f.arg, n)
            return None if body is None else NotI(f.arg, body)
        lf = linear_form(f)
        if lf is None or lf[1] != "le":
            return None
        if isinstance(f, Not):
            body = self.lia_with(st, f.arg, n)
            return None if body is None else NotI(f.arg, body)
        body = self.lia_with(st, Not(f), n)
        return None if body is None else Contra(NotI(Not(f), body))

    def status(self, st, f):
        nk = _key(_neg(f))
        if nk in st.known or nk in st.proved:
            return ("refuted", None)
        p = self.prove_atom(st, f)
        if p is not None:
            return ("proven", p)
        if self.prove_atom(st, _neg(f)) is not None:
            return ("refuted", None)
        return ("unknown", None)

    def fire(self, st):
        progress = False
        for item in st.imps:
            ante, concl, c, state, nand = item
            if state != "open":
                continue
            parts = _conjuncts(ante)
            proofs = []
            for conj in parts:
                s, pr = self.status(st, conj)
                if s == "refuted":
                    item[3] = "dead"
                    break
                if s != "proven":
                    break
                proofs.append(pr)
            if item[3] == "dead" or len(proofs) != len(parts):
                continue
            item[3] = "fired"
            arg = _rebuild_and(ante, proofs)
            if nand is not None:
                n = len(st.ctx)
                st.add(concl, NotI(nand.right, ImpE(c, AndI(arg, Hyp(n)))))
            else:
                st.add(concl, ImpE(c, arg))
            progress = True
        return progress

    # -- theories ---------------------------------------------------------

    def theory(self, st):
        added = False
        for f, _ in list(st.facts):
            ts = []
            _ground_terms(f, ts)
            for t in ts:
                k = to_text(t)
                if k in st.terms_done:
                    continue
                st.terms_done.add(k)
                added |= self.theory_term(st, t)
        return added

    def _ax(self, st, sid, inst):
        st.pending.append((axioms.instantiate(sid, inst), Axiom(sid, inst)))

    def theory_term(self, st, t):
        if isinstance(t, Card):
            s = t.arg
            self._ax(st, "card_nonneg", (("A", s),))
            if isinstance(s, BinOp):
                self._ax(st, _SETOP_CARD[s.op], (("A", s.left), ("B", s.right)))
            elif isinstance(s, SetLit):
                if not s.elems:
                    self._ax(st, "card_empty", ())
                elif len(s.elems) <= axioms.MAX_LIT:
                    self._ax(st, f"card_lit{len(s.elems)}",
                             tuple((f"e{m + 1}", e) for m, e in enumerate(s.elems)))
            return True
        if isinstance(t, Len):
            self._ax(st, "len_nonneg", (("v", t.arg),))
            if isinstance(t.arg, Upd):
                u = t.arg
                self._ax(st, "len_upd", (("v", u.vec), ("i", u.index), ("e", u.value)))
            elif isinstance(t.arg, NewVec):
                self._ax(st, "len_newvec", (("n", t.arg.length),))
            return True
        if isinstance(t, Idx):
            if isinstance(t.vec, Upd):
                u = t.vec
                inst = (("v", u.vec), ("i", u.index), ("e", u.value), ("j", t.index))
                self._ax(st, "idx_upd_eq", inst)
                self._ax(st, "idx_upd_ne", inst)
                return True
            if isinstance(t.vec, NewVec):
                self._ax(st, "idx_newvec", (("n", t.vec.length), ("i", t.index)))
                return True
            return False
        if isinstance(t, BinOp) and t.op in ("div", "mod"):
            d = t.right
            inst = (("e", t.left), ("d", d))
            if isinstance(d, IntLit):
                if d.value:
                    sid = "divmod_pos" if d.value > 0 else "divmod_neg"
                    ax = axioms.instantiate(sid, inst)
                    st.pending.append((ax.right, ImpE(Axiom(sid, inst), Eval(ax.left))))
                return True
            self._ax(st, "divmod_pos", inst)
            self._ax(st, "divmod_neg", inst)
            return True
        return False

    # -- equalities -------------------------------------------------------

    def equalities(self, st):
        idx_groups = {}
        atoms = {}
        for f, _ in st.facts:
            ts = []
            _ground_terms(f, ts)
            for t in ts:
                if isinstance(t, Idx):
                    idx_groups.setdefault(atom_key(t.vec), {})[atom_key(t)] = t
                if sort_of(t) == INT:
                    _int_atoms(t, atoms)
        nonlinear = set()
        for p, _, _ in st.linear:
            for m in p:
                if len(m) > 1:
                    nonlinear.update(m)
        progress = False
        for group in idx_groups.values():
            items = [group[k] for k in sorted(group)]
            for i in range(len(items)):
                for j in range(i + 1, len(items)):
                    progress |= self.congruence(st, items[i], items[j])
        keys = sorted(k for k in atoms if k in nonlinear)
        for ka in keys:
            for kb in sorted(atoms):
                if ka != kb:
                    progress |= self.rewrite_nonlinear(st, atoms[ka], atoms[kb])
        return progress

    def congruence(self, st, s, t):
        key = ("idx", to_text(s), to_text(t))
        if key in st.eq_done:
            return False
        a, b = s.index, t.index
        if _contains(a, b) or _contains(b, a):
            st.eq_done.add(key)
            return False
        pr = self.prove_atom(st, Atom("eq", a, b))
        if pr is None:
            return False
        st.eq_done.add(key)
        pos = _count(s, b) + _count(t.vec, b)
        st.add(Atom("eq", s, t), Rewrite(pr, Refl(s), (pos,)))
        return True

    def rewrite_nonlinear(self, st, a, b):
        key = ("nl", to_text(a), to_text(b))
        if key in st.eq_done:
            return False
        if _contains(a, b) or _contains(b, a):
            st.eq_done.add(key)
            return False
        pr = self.prove_atom(st, Atom("eq", a, b))
        if pr is None:
            return False
        st.eq_done.add(key)
        ka = atom_key(a)
        progress = False
        for f, c in list(st.facts):
            lf = linear_form(f)
            if lf is None or not any(len(m) > 1 and ka in m for m in lf[0]):
                continue
            new, positions = _replace_tracking(f, a, b)
            if not positions:
                continue
            if _key(new) not in st.known:
                st.add(new, Rewrite(pr, c, tuple(positions)))
                progress = True
        return progress

    # -- quantifiers ------------------------------------------------------

    def instantiate(self, st):
        if st.instances >= MAX_INSTANCES:
            return False
        ground, mems = [], []
        for f, _ in st.facts:
            _ground_terms(f, ground)
            _ground_mems(f, mems)
        progress = False
        for f, c in list(st.foralls):
            for w in self.witnesses(st, f, ground, mems):
                key = (_key(f), to_text(w))
                if key in st.used_witness:
                    continue
                st.used_witness.add(key)
                st.instances += 1
                st.add(substitute(f.body, f.var, w), ForallE(c, w))
                progress = True
                if st.instances >= MAX_INSTANCES:
                    return progress
        return progress

    def witnesses(self, st, f, ground, mems):
        trig = []
        _triggers(f.body, f.var, trig)
        out = {}
        if trig:
            for kind, fixed, offset in trig:
                fk = atom_key(fixed)
                if kind == "idx":
                    cands = [t.index for t in ground if isinstance(t, Idx) and atom_key(t.vec) == fk]
                else:
                    cands = [x for x, s in mems if atom_key(s) == fk]
                for x in cands:
                    w = x if offset == 0 else sub(x, IntLit(offset))
                    out.setdefault(to_text(w), w)
            return list(out.values())
        names = {}
        for h, _ in st.facts:
            for n, s in free_vars(h).items():
                if s == INT:
                    names[n] = Var(n, INT)
        return [names[n] for n in sorted(names)][:6]


__all__ = ["DEFAULT_BUDGET_MS", "GiveUp", "closed", "em", "prove"]
