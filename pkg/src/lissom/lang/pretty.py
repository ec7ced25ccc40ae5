"""Canonical source printer: one statement per line, two-space indent.

Parentheses are inserted only where precedence requires them, so printing
and re-parsing yields a structurally equal tree.
"""

from . import ast as A

_LEVEL = {
    "<==>": 1, "==>": 2, "or": 3, "and": 4,
    "==": 6, "!=": 6, "<": 6, "<=": 6, ">": 6, ">=": 6, "in": 6, "subset": 6,
    "+": 7, "-": 7, "union": 7, "inter": 7, "diff": 7,
    "*": 8, "div": 8, "mod": 8,
}


def expr_text(e, level=0):
    s, own = _expr(e)
    return f"({s})" if own < level else s


def _expr(e):
    if isinstance(e, A.IntConst):
        return str(e.value), 11
    if isinstance(e, A.BoolConst):
        return ("true" if e.value else "false"), 11
    if isinstance(e, A.Name):
        return e.id, 11
    if isinstance(e, A.Old):
        return f"\\old({e.id})", 11
    if isinstance(e, A.Result):
        return "\\result", 11
    if isinstance(e, A.Unary):
        if e.op == "not":
            return "not " + expr_text(e.arg, 5), 5
        return "-" + expr_text(e.arg, 9), 9
    if isinstance(e, A.Binary):
        lv = _LEVEL[e.op]
        if e.op == "==>":
            left, right = lv + 1, lv
        elif lv == 6:
            left = right = 7
        else:
            left, right = lv, lv + 1
        return f"{expr_text(e.left, left)} {e.op} {expr_text(e.right, right)}", lv
    if isinstance(e, A.Index):
        return f"{expr_text(e.vec, 10)}[{expr_text(e.index)}]", 10
    if isinstance(e, A.SetLiteral):
        return "{" + ", ".join(expr_text(x) for x in e.elems) + "}", 11
    if isinstance(e, A.Builtin):
        return f"{e.name}(" + ", ".join(expr_text(x) for x in e.args) + ")", 11
    if isinstance(e, A.Call):
        return f"{e.func}(" + ", ".join(expr_text(x) for x in e.args) + ")", 11
    if isinstance(e, A.ForallE):
        # the body extends to the right as far as possible
        return f"forall {e.var} :: {expr_text(e.body)}", 0
    raise TypeError(e)


def stmt_lines(s, indent):
    pad = "  " * indent
    if isinstance(s, A.VarDecl):
        return [f"{pad}var {s.name}: {s.type} := {expr_text(s.init)};"]
    if isinstance(s, A.Assign):
        return [f"{pad}{s.name} := {expr_text(s.value)};"]
    if isinstance(s, A.VecStore):
        return [f"{pad}{s.name}[{expr_text(s.index)}] := {expr_text(s.value)};"]
    if isinstance(s, A.If):
        out = [f"{pad}if {expr_text(s.cond)} {{"]
        out += block_lines(s.then, indent + 1)
        if s.els:
            out.append(f"{pad}}} else {{")
            out += block_lines(s.els, indent + 1)
        out.append(f"{pad}}}")
        return out
    if isinstance(s, A.While):
        out = [f"{pad}while {expr_text(s.cond)} invariant {expr_text(s.invariant)} {{"]
        out += block_lines(s.body, indent + 1)
        out.append(f"{pad}}}")
        return out
    if isinstance(s, A.Assert):
        return [f"{pad}assert {expr_text(s.formula)};"]
    if isinstance(s, A.Return):
        return [f"{pad}return;" if s.value is None else f"{pad}return {expr_text(s.value)};"]
    if isinstance(s, A.Print):
        return [f"{pad}print {expr_text(s.value)};"]
    raise TypeError(s)


def block_lines(body, indent):
    out = []
    for s in body:
        out += stmt_lines(s, indent)
    return out


def function_text(f):
    params = ", ".join(f"{p.name}: {p.type}" for p in f.params)
    head = f"fun {f.name}({params})" + (f": {f.ret}" if f.ret else "")
    lines = [head]
    lines += [f"  requires {expr_text(r)}" for r in f.requires]
    lines += [f"  ensures {expr_text(e)}" for e in f.ensures]
    lines.append("{")
    lines += block_lines(f.body, 1)
    lines.append("}")
    return "\n".join(lines)


def program_text(p):
    return "\n\n".join(function_text(f) for f in p.functions) + "\n"
