"""Side-effect-free expression evaluation, with fuel.

Ghost fields may recurse, so evaluation is partial twice over: an expression
can be genuinely undefined (unbound variable, bad receiver, missing ghost,
arithmetic on the wrong kind of value) or can fail to settle within the fuel
allowance.  Both come back as Undefined with a machine-readable reason; only
ghost application consumes fuel, so results are monotone in it.

Field selection ``e.f`` reads a heap field when the object has one and falls
back to a zero-argument ghost otherwise.  Note that expression evaluation is
the assertion layer's view of the heap: unlike running code it may read any
object's fields, whatever the class at hand.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

from . import langoo as L
from .langoo import Expr, ModuleDef, lookup_ghost
from .runtime import (
    FALSE,
    NULL,
    TRUE,
    Addr,
    Bool,
    Config,
    Frame,
    Nat,
    Value,
    class_of_addr,
    interp_var,
)

# Deep ghost recursion is ordinary here (a fuel of 1000 means on the order of
# a few thousand Python frames), so lift the interpreter's default limit.
if sys.getrecursionlimit() < 60_000:
    sys.setrecursionlimit(60_000)

FUEL_EXHAUSTED = "fuel-exhausted"
UNBOUND = "unbound"
BAD_RECEIVER = "bad-receiver"
NO_SUCH_GHOST = "no-such-ghost"
STUCK_ARITH = "stuck-arith"


@dataclass(frozen=True)
class Defined:
    value: Value


@dataclass(frozen=True)
class Undefined:
    reason: str
    detail: str = dc_field(default="", compare=False)


EvalResult = Union[Defined, Undefined]


def eval_expr(module: ModuleDef, config: Config, expr: Expr, fuel: int) -> EvalResult:
    """Evaluate ``expr`` in the top frame of ``config``, resolving ghost
    declarations through ``module``."""
    if isinstance(expr, L.TrueLit):
        return Defined(TRUE)
    if isinstance(expr, L.FalseLit):
        return Defined(FALSE)
    if isinstance(expr, L.NullLit):
        return Defined(NULL)
    if isinstance(expr, L.NatLit):
        return Defined(Nat(expr.value))
    if isinstance(expr, L.Var):
        v = interp_var(config, expr.name)
        if v is None:
            return Undefined(UNBOUND, f"variable {expr.name} is unbound")
        return Defined(v)
    if isinstance(expr, L.Eq):
        lhs = eval_expr(module, config, expr.lhs, fuel)
        if isinstance(lhs, Undefined):
            return lhs
        rhs = eval_expr(module, config, expr.rhs, fuel)
        if isinstance(rhs, Undefined):
            return rhs
        return Defined(Bool(lhs.value == rhs.value))
    if isinstance(expr, L.If):
        cond = eval_expr(module, config, expr.cond, fuel)
        if isinstance(cond, Undefined):
            return cond
        if not isinstance(cond.value, Bool):
            return Undefined(STUCK_ARITH, f"condition is {cond.value!r}, not a boolean")
        branch = expr.then if cond.value.value else expr.orelse
        return eval_expr(module, config, branch, fuel)
    if isinstance(expr, L.Plus):
        return _arith(module, config, expr, fuel, lambda a, b: Nat(a + b))
    if isinstance(expr, L.Geq):
        return _arith(module, config, expr, fuel, lambda a, b: Bool(a >= b))
    if isinstance(expr, L.FieldSel):
        target = eval_expr(module, config, expr.target, fuel)
        if isinstance(target, Undefined):
            return target
        if not isinstance(target.value, Addr):
            return Undefined(BAD_RECEIVER, f"{target.value!r} has no fields")
        record = config.heap.get(target.value)
        if record is None:
            return Undefined(BAD_RECEIVER, f"dangling address {target.value!r}")
        if expr.name in record.fields:
            return Defined(record.fields[expr.name])
        return _apply_ghost(module, config, target.value, expr.name, (), fuel)
    if isinstance(expr, L.GhostCall):
        target = eval_expr(module, config, expr.target, fuel)
        if isinstance(target, Undefined):
            return target
        if not isinstance(target.value, Addr):
            return Undefined(BAD_RECEIVER, f"{target.value!r} has no ghost fields")
        if target.value not in config.heap:
            return Undefined(BAD_RECEIVER, f"dangling address {target.value!r}")
        args = []
        for a in expr.args:
            r = eval_expr(module, config, a, fuel)
            if isinstance(r, Undefined):
                return r
            args.append(r.value)
        return _apply_ghost(module, config, target.value, expr.name, tuple(args), fuel)
    raise TypeError(f"not an expression: {expr!r}")


def _arith(module, config, expr, fuel, op) -> EvalResult:
    lhs = eval_expr(module, config, expr.lhs, fuel)
    if isinstance(lhs, Undefined):
        return lhs
    rhs = eval_expr(module, config, expr.rhs, fuel)
    if isinstance(rhs, Undefined):
        return rhs
    if not isinstance(lhs.value, Nat) or not isinstance(rhs.value, Nat):
        return Undefined(
            STUCK_ARITH, f"arithmetic over {lhs.value!r} and {rhs.value!r}"
        )
    return Defined(op(lhs.value.value, rhs.value.value))


def _apply_ghost(
    module: ModuleDef,
    config: Config,
    receiver: Addr,
    name: str,
    args: tuple[Value, ...],
    fuel: int,
) -> EvalResult:
    cls = class_of_addr(config, receiver)
    decl = lookup_ghost(module, cls, name) if cls is not None else None
    if decl is None:
        return Undefined(NO_SUCH_GHOST, f"class {cls} has no ghost {name}")
    if len(decl.params) != len(args):
        return Undefined(
            NO_SUCH_GHOST,
            f"ghost {cls}.{name} takes {len(decl.params)} arguments, got {len(args)}",
        )
    if fuel <= 0:
        return Undefined(FUEL_EXHAUSTED, f"while unfolding ghost {cls}.{name}")
    # The body runs with the receiver as ``this`` and actuals bound over a
    # scratch copy of the top frame; formals shadow, so no capture.
    bindings = dict(config.top.vars)
    bindings["this"] = receiver
    for p, v in zip(decl.params, args):
        bindings[p] = v
    scratch = config.with_top(Frame(config.top.contn, bindings))
    return eval_expr(module, scratch, decl.body, fuel - 1)
