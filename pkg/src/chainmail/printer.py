"""Rendering of modules, statements, expressions, and assertions back to
surface syntax.  Printing is deterministic and inserts the minimum brackets
the grammar needs, so parse(print(x)) == x for anything the parser can
produce."""

from __future__ import annotations

from . import assertions as A
from . import langoo as L

# expression precedence levels: if 0, = 1, >= 2, + 3, postfix 4, atom 5


def print_expr(e: L.Expr, prec: int = 0) -> str:
    if isinstance(e, L.TrueLit):
        return "true"
    if isinstance(e, L.FalseLit):
        return "false"
    if isinstance(e, L.NullLit):
        return "null"
    if isinstance(e, L.NatLit):
        return str(e.value)
    if isinstance(e, L.Var):
        return e.name
    if isinstance(e, L.If):
        s = (
            f"if {print_expr(e.cond, 1)} then {print_expr(e.then, 1)} "
            f"else {print_expr(e.orelse, 1)}"
        )
        return f"({s})" if prec > 0 else s
    if isinstance(e, L.Eq):
        s = f"{print_expr(e.lhs, 2)} = {print_expr(e.rhs, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, L.Geq):
        s = f"{print_expr(e.lhs, 3)} >= {print_expr(e.rhs, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(e, L.Plus):
        s = f"{print_expr(e.lhs, 3)} + {print_expr(e.rhs, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(e, L.FieldSel):
        return f"{print_expr(e.target, 4)}.{e.name}"
    if isinstance(e, L.GhostCall):
        args = ", ".join(print_expr(a) for a in e.args)
        return f"{print_expr(e.target, 4)}.{e.name}({args})"
    raise TypeError(f"not an expression: {e!r}")


def print_stmt(s: L.Stmt) -> str:
    if isinstance(s, L.FieldWrite):
        return f"{s.obj}.{s.field} := {print_expr(s.value)}"
    if isinstance(s, L.FieldRead):
        return f"{s.target} := {s.obj}.{s.field}"
    if isinstance(s, L.Call):
        args = ", ".join(print_expr(a) for a in s.args)
        return f"{s.target} := {s.recv}.{s.method}({args})"
    if isinstance(s, L.New):
        args = ", ".join(print_expr(a) for a in s.args)
        return f"{s.target} := new {s.class_id}({args})"
    if isinstance(s, L.Return):
        return f"return {print_expr(s.value)}"
    raise TypeError(f"not a statement: {s!r}")


def print_stmts(stmts) -> list[str]:
    return [print_stmt(s) for s in stmts]


def print_module(m: L.ModuleDef) -> str:
    chunks = []
    for c in m.classes:
        lines = [f"class {c.name} {{"]
        for f in c.fields:
            lines.append(f"  field {f}")
        for meth in c.methods:
            params = ", ".join(meth.params)
            lines.append(f"  method {meth.name}({params}) {{")
            for s in meth.body:
                lines.append(f"    {print_stmt(s)};")
            lines.append("  }")
        for g in c.ghosts:
            params = ", ".join(g.params)
            lines.append(f"  ghost {g.name}({params}) {{ {print_expr(g.body)} }}")
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


# assertion precedence levels: quantifier/space 0, ==> 1, || 2, && 3, unary 4


def print_assertion(a: A.Assertion, prec: int = 0) -> str:
    if isinstance(a, A.ExprHolds):
        return print_expr(a.expr, 2)
    if isinstance(a, A.Eq):
        return f"{print_expr(a.lhs, 2)} = {print_expr(a.rhs, 2)}"
    if isinstance(a, A.HasClass):
        return f"{print_expr(a.expr, 2)} : {a.class_id}"
    if isinstance(a, A.In):
        return f"{print_expr(a.expr, 2)} in {a.set_var}"
    if isinstance(a, A.Access):
        return f"access({print_expr(a.of)}, {print_expr(a.to)})"
    if isinstance(a, A.Calls):
        args = ", ".join(
            "_" if isinstance(x, A.Wildcard) else print_expr(x) for x in a.args
        )
        return f"calls({print_expr(a.caller)}, {a.method}, {print_expr(a.recv)}, [{args}])"
    if isinstance(a, A.External):
        return f"external({print_expr(a.expr)})"
    if isinstance(a, A.Internal):
        return f"internal({print_expr(a.expr)})"
    if isinstance(a, A.Changes):
        return f"changes({print_expr(a.expr)})"
    if isinstance(a, A.Not):
        return f"!{print_assertion(a.body, 4)}"
    if isinstance(a, A.Next):
        return f"next {print_assertion(a.body, 4)}"
    if isinstance(a, A.Will):
        return f"will {print_assertion(a.body, 4)}"
    if isinstance(a, A.Prev):
        return f"prev {print_assertion(a.body, 4)}"
    if isinstance(a, A.Was):
        return f"was {print_assertion(a.body, 4)}"
    if isinstance(a, A.And):
        s = f"{print_assertion(a.lhs, 3)} && {print_assertion(a.rhs, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(a, A.Or):
        s = f"{print_assertion(a.lhs, 2)} || {print_assertion(a.rhs, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(a, A.Implies):
        s = f"{print_assertion(a.lhs, 2)} ==> {print_assertion(a.rhs, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(a, A.ForallObj):
        return _wrap(f"forall {a.var}. {print_assertion(a.body)}", prec)
    if isinstance(a, A.ExistsObj):
        return _wrap(f"exists {a.var}. {print_assertion(a.body)}", prec)
    if isinstance(a, A.ForallSet):
        return _wrap(f"forall {a.var}:SET. {print_assertion(a.body)}", prec)
    if isinstance(a, A.ExistsSet):
        return _wrap(f"exists {a.var}:SET. {print_assertion(a.body)}", prec)
    if isinstance(a, A.Space):
        return _wrap(f"in {a.set_var}: {print_assertion(a.body)}", prec)
    if isinstance(a, A.BindValue):
        raise ValueError("BindValue is internal and has no surface syntax")
    raise TypeError(f"not an assertion: {a!r}")


def _wrap(s: str, prec: int) -> str:
    return f"({s})" if prec > 0 else s


def print_spec(spec: A.Spec) -> str:
    lines = []
    for named in spec.assertions:
        lines.append(f"assert {named.name}:")
        lines.append(f"  {print_assertion(named.body)};")
        lines.append("")
    return "\n".join(lines)
