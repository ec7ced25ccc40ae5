"""Weakest-precondition obligations over the typed source AST.

Obligation order: functions in program order; within a function the entry
segment comes first, then one segment per loop in source order.  Each
segment lists its side obligations (safety guards, callee preconditions,
asserts) in evaluation order followed by its main obligation(s).
"""

from ..lang import ast as A
from ..lang.tologic import SORT, ToLogic, logical_var, spec_formula
from ..logic.syntax import Not, Upd, conj, free_vars, in_bounds, make_var, subst_map
from . import core as C
from .obligation import SOURCE

POST_TAG = ("post",)


def _line(node):
    return node.pos[0] if getattr(node, "pos", None) else 0


def _assigned(decl):
    names = set()
    for s in A.walk_stmts(decl.body):
        if isinstance(s, (A.Assign, A.VecStore)):
            names.add(s.name)
    return names


def _contract(info):
    d = info.decl
    return (conj([spec_formula(r) for r in d.requires]),
            conj([spec_formula(e) for e in d.ensures]))


def _number_events(body):
    """Static numbering of calls and reads in code emission order."""
    calls, reads = {}, {}

    def expr(e):
        if isinstance(e, A.Binary):
            expr(e.left)
            expr(e.right)
        elif isinstance(e, A.Unary):
            expr(e.arg)
        elif isinstance(e, A.Index):
            expr(e.vec)
            expr(e.index)
        elif isinstance(e, A.SetLiteral):
            for x in e.elems:
                expr(x)
        elif isinstance(e, A.Call):
            for a in e.args:
                expr(a)
            calls[id(e)] = len(calls)
        elif isinstance(e, A.Builtin):
            for a in e.args:
                expr(a)
            if e.name == "read":
                reads[id(e)] = len(reads)

    def block(stmts):
        for s in stmts:
            if isinstance(s, A.VarDecl):
                expr(s.init)
            elif isinstance(s, A.Assign):
                expr(s.value)
            elif isinstance(s, A.VecStore):
                expr(s.index)
                expr(s.value)
            elif isinstance(s, (A.Print, A.Return)):
                if s.value is not None:
                    expr(s.value)
            elif isinstance(s, A.If):
                expr(s.cond)
                block(s.then)
                block(s.els)
            elif isinstance(s, A.While):
                expr(s.cond)
                block(s.body)

    block(body)
    return calls, reads


class _FunctionVC:
    def __init__(self, tp, info):
        self.tp = tp
        self.info = info
        self.calls, self.reads = _number_events(info.decl.body)
        _, ens = _contract(info)
        self.ensures = ens
        self.loops = []          # (line, col, key, hyp, tree)

    # expression translation with evaluation events
    def translate(self, e, loc):
        events = []

        def on_guard(kind, g):
            events.append(("check", C.safety(kind), g, loc))

        def on_call(call, args):
            callee = self.tp.info(call.func)
            req, ens = _contract(callee)
            params = [(p.name, SORT[p.type]) for p in callee.decl.params]
            assigned = {i for i, (p, _) in enumerate(params) if p in _assigned(callee.decl)}
            pre, post, result = C.callee_contract(req, ens, params, assigned, args,
                                                  self.calls[id(call)], SORT[callee.ret])
            events.append(("call", pre, post, loc))
            return result

        def on_read(node):
            return make_var(C.read_name(self.reads[id(node)]), SORT[A.INT])

        tl = ToLogic(on_guard=on_guard, on_call=on_call, on_read=on_read)
        return events, tl(e)

    def var(self, name):
        return logical_var(name, self.info.types[name])

    def block(self, stmts, q):
        k = len(stmts)
        while k > 0:
            s = stmts[k - 1]
            if isinstance(s, A.Assert):
                j = k
                while j > 0 and isinstance(stmts[j - 1], A.Assert):
                    j -= 1
                run = stmts[j:k]
                f = conj([spec_formula(a.formula) for a in run])
                q = C.Check(C.ASSERT, f, _line(run[0]), q)
                k = j
                continue
            q = self.stmt(s, q)
            k -= 1
        return q

    def stmt(self, s, q):
        loc = _line(s)
        if isinstance(s, (A.VarDecl, A.Assign)):
            ev, t = self.translate(s.init if isinstance(s, A.VarDecl) else s.value, loc)
            return C.wrap(ev, C.subst(q, {s.name: t}))
        if isinstance(s, A.VecStore):
            v = self.var(s.name)
            ev1, i = self.translate(s.index, loc)
            ev2, x = self.translate(s.value, loc)
            ev = ev1 + ev2 + [("check", C.safety("OutOfBounds"), in_bounds(v, i), loc)]
            return C.wrap(ev, C.subst(q, {s.name: Upd(v, i, x)}))
        if isinstance(s, A.Print):
            ev, _ = self.translate(s.value, loc)
            return C.wrap(ev, q)
        if isinstance(s, A.Return):
            if s.value is None:
                return C.Goal(self.ensures, POST_TAG)
            ev, t = self.translate(s.value, loc)
            return C.wrap(ev, C.Goal(subst_map(self.ensures, {"\\result": t}), POST_TAG))
        if isinstance(s, A.If):
            ev, c = self.translate(s.cond, loc)
            return C.wrap(ev, C.Both(C.Assume(c, self.block(s.then, q)),
                                     C.Assume(Not(c), self.block(s.els, q))))
        if isinstance(s, A.While):
            key = (s.pos or (0, 0))
            inv = spec_formula(s.invariant)
            ev, c = self.translate(s.cond, loc)
            body = self.block(s.body, C.Goal(inv, ("inv", key)))
            self.loops.append((key, inv, C.wrap(ev, C.Split(c, body, q)), loc))
            return C.Goal(inv, ("inv", key))
        raise C.VCError(f"unexpected statement {type(s).__name__}")

    def obligations(self):
        d = self.info.decl
        # falling off the end only happens in void functions
        tree = self.block(d.body, C.Goal(self.ensures, POST_TAG))
        req, _ = _contract(self.info)
        params = [(p.name, SORT[p.type]) for p in d.params]
        hyp = C.entry_hypothesis(req, params, free_vars(self.ensures))
        fmt = "line {}".format
        out = C.segment_obligations(SOURCE, d.name, hyp, tree, None, _line(d), fmt)
        for key, inv, t, loc in sorted(self.loops, key=lambda x: x[0]):
            out += C.segment_obligations(SOURCE, d.name, inv, t, key, loc, fmt)
        return out


def generate_source_obligations(tp):
    out = []
    for info in tp.functions.values():
        out += _FunctionVC(tp, info).obligations()
    return out


def wp_source(tp, function, stmts, post):
    """Weakest precondition of ``stmts`` (statements of ``function``) w.r.t.
    ``post``; returns ``(pre, side)`` where ``side`` lists side obligations
    as ``(site, formula)``.  Loop segments inside become side obligations.
    """
    fv = _FunctionVC(tp, tp.info(function))
    tree = fv.block(stmts, C.Goal(post, POST_TAG))
    side = [(site, f) for site, _, f in C._sides(tree)]
    mains = C._mains(tree)
    (pre, _, _), = mains
    for key, inv, t, loc in sorted(fv.loops, key=lambda x: x[0]):
        for o in C.segment_obligations(SOURCE, function, inv, t, key, loc, str):
            side.append((o.site, o.formula))
    return pre, side
