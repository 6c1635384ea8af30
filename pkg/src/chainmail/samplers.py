"""Seeded random generators for the property suites.

Everything here draws from an explicit ``random.Random`` so that a recorded
seed reproduces a run exactly.  The sampled worlds are deliberately small
and a little hostile: heaps of two to five objects over a fixed pair of
fixture modules, with reference cycles common enough that partial ghost
functions actually go undefined in the sample pool.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from . import assertions as A
from . import langoo as L
from .assertions import EvalContext
from .interpreter import Bounds, record_trace
from .parser import parse_module, parse_stmts
from .runtime import (
    Addr,
    AddrSet,
    Config,
    Continuation,
    Frame,
    NULL,
    Nat,
    ObjectRecord,
    Value,
)

INTERNAL_FIXTURE = parse_module(
    """
class Cell {
  field val
  field next
  method get() { t := this.val; return t; }
  method put(x) { this.val := x; return x; }
  method cut() { this.next := null; return null; }
  ghost chase() { if this.next = null then this else this.next.chase() }
  ghost total() { if this.next = null then this.val else this.val + this.next.total() }
}
class Pair {
  field fst
  field snd
  method swap() { a := this.fst; b := this.snd; this.fst := b; this.snd := a; return a; }
}
""",
    "<internal-fixture>",
)

EXTERNAL_FIXTURE = parse_module(
    """
class Probe {
  field ref
  method poke(c) { t := c.get(); return t; }
  method grab(c) { this.ref := c; return c; }
  method idle() { return null; }
}
""",
    "<external-fixture>",
)

_FIELD_NAMES = ("val", "next", "fst", "snd", "ref")
_CLASS_NAMES = ("Cell", "Pair", "Probe", "Object")


def _random_value(rng: random.Random, addrs: Sequence[Addr]) -> Value:
    roll = rng.random()
    if roll < 0.2:
        return NULL
    if roll < 0.5:
        return Nat(rng.randint(0, 5))
    return rng.choice(list(addrs))


def random_config(rng: random.Random) -> Config:
    """A small heap over the fixture classes, a frame with a handful of
    variables, and a short continuation.  ``this`` is external."""
    n = rng.randint(2, 5)
    addrs = [Addr(i + 1) for i in range(n)]
    heap = {}
    heap[addrs[0]] = ObjectRecord("Probe", {"ref": _random_value(rng, addrs)})
    for addr in addrs[1:]:
        cls = rng.choice(("Cell", "Cell", "Cell", "Pair", "Probe"))
        if cls == "Cell":
            nxt = rng.choice(list(addrs) + [NULL, NULL])
            heap[addr] = ObjectRecord(
                "Cell", {"val": _random_value(rng, addrs), "next": nxt}
            )
        elif cls == "Pair":
            heap[addr] = ObjectRecord(
                "Pair",
                {"fst": _random_value(rng, addrs), "snd": _random_value(rng, addrs)},
            )
        else:
            heap[addr] = ObjectRecord("Probe", {"ref": _random_value(rng, addrs)})
    vars = {"this": addrs[0]}
    for name in ("a", "b", "c"):
        if rng.random() < 0.85:
            vars[name] = _random_value(rng, addrs)
    if rng.random() < 0.6:
        vars["S0"] = AddrSet(frozenset(a for a in addrs if rng.random() < 0.5))
    stmts = []
    pool = [name for name in ("a", "b", "c") if name in vars]
    for _ in range(rng.randint(0, 2)):
        if not pool:
            break
        recv = rng.choice(pool)
        kind = rng.random()
        if kind < 0.4:
            stmts.append(parse_stmts(f"t := {recv}.get();"))
        elif kind < 0.6:
            stmts.append(parse_stmts(f"t := {recv}.put({rng.choice(pool)});"))
        elif kind < 0.8:
            stmts.append(parse_stmts(f"this.ref := {recv};"))
        else:
            stmts.append(parse_stmts(f"t := new Cell({recv});"))
    flat = tuple(s for group in stmts for s in group)
    frame = Frame(Continuation(flat), vars)
    return Config((frame,), heap)


def _random_driver(rng: random.Random) -> tuple[L.Stmt, ...]:
    lines = ["x := new Cell(); y := new Probe();"]
    for _ in range(rng.randint(1, 4)):
        lines.append(
            rng.choice(
                [
                    "t := y.poke(x);",
                    "t := y.grab(x);",
                    "t := x.put(y);",
                    "z := new Cell(x); x := z.get();",
                    "t := y.idle();",
                ]
            )
        )
    return parse_stmts(" ".join(lines))


def random_context(rng: random.Random, bounds: Bounds = Bounds()) -> EvalContext:
    """Either a directly built configuration (history of one) or a position
    inside a short recorded run (real history, so the past operators have
    something to look at)."""
    if rng.random() < 0.5:
        return EvalContext.for_config(
            INTERNAL_FIXTURE, EXTERNAL_FIXTURE, random_config(rng), bounds
        )
    trace = record_trace(
        INTERNAL_FIXTURE, EXTERNAL_FIXTURE, _random_driver(rng), bounds
    )
    position = rng.randrange(len(trace))
    return EvalContext.at(trace, position, bounds)


# ---------------------------------------------------------------------------
# Expressions and assertions
# ---------------------------------------------------------------------------


def _scope(ctx: EvalContext, extra: Sequence[str]) -> list[str]:
    names = [n for n in ctx.current.top.vars if not isinstance(
        ctx.current.top.vars[n], AddrSet)]
    names.extend(extra)
    return names or ["this"]


def _set_scope(ctx: EvalContext, extra: Sequence[str]) -> list[str]:
    names = [n for n, v in ctx.current.top.vars.items() if isinstance(v, AddrSet)]
    names.extend(n for n in extra if n and n[0].isupper())
    return names


def random_expr(
    rng: random.Random,
    ctx: EvalContext,
    depth: int = 2,
    extra_vars: Sequence[str] = (),
) -> L.Expr:
    scope = _scope(ctx, [n for n in extra_vars if n[:1].islower()])
    if depth <= 0 or rng.random() < 0.35:
        roll = rng.random()
        if roll < 0.5:
            return L.Var(rng.choice(scope))
        if roll < 0.65:
            return L.NatLit(rng.randint(0, 5))
        if roll < 0.75:
            return L.NullLit()
        if roll < 0.85:
            return L.TrueLit()
        return L.FalseLit()
    roll = rng.random()
    sub = lambda: random_expr(rng, ctx, depth - 1, extra_vars)
    if roll < 0.35:
        return L.FieldSel(sub(), rng.choice(_FIELD_NAMES))
    if roll < 0.55:
        return L.GhostCall(sub(), rng.choice(("chase", "total")), ())
    if roll < 0.7:
        return L.Plus(sub(), sub())
    if roll < 0.8:
        return L.Geq(sub(), sub())
    if roll < 0.9:
        return L.Eq(sub(), sub())
    return L.If(sub(), sub(), sub())


def random_assertion(
    rng: random.Random,
    ctx: EvalContext,
    depth: int = 2,
    extra_vars: Sequence[str] = (),
    binder_depth: int = 0,
) -> A.Assertion:
    def atom() -> A.Assertion:
        roll = rng.random()
        e = lambda: random_expr(rng, ctx, 1, extra_vars)
        if roll < 0.3:
            return A.ExprHolds(e())
        if roll < 0.5:
            return A.Eq(e(), e())
        if roll < 0.6:
            return A.HasClass(e(), rng.choice(_CLASS_NAMES))
        if roll < 0.7:
            sets = _set_scope(ctx, extra_vars)
            if sets:
                return A.In(e(), rng.choice(sets))
            return A.Eq(e(), e())
        if roll < 0.8:
            return A.Access(e(), e())
        if roll < 0.87:
            return A.External(e())
        if roll < 0.94:
            return A.Internal(e())
        return A.Calls(L.Var("this"), rng.choice(("get", "put", "poke")), e(), ())

    if depth <= 0 or rng.random() < 0.3:
        return atom()
    roll = rng.random()
    sub = lambda: random_assertion(rng, ctx, depth - 1, extra_vars, binder_depth)
    if roll < 0.2:
        return A.Not(sub())
    if roll < 0.4:
        return A.And(sub(), sub())
    if roll < 0.6:
        return A.Or(sub(), sub())
    if roll < 0.7:
        return A.Implies(sub(), sub())
    if roll < 0.8 and binder_depth < 2:
        var = f"q{binder_depth}"
        body = random_assertion(
            rng, ctx, depth - 1, tuple(extra_vars) + (var,), binder_depth + 1
        )
        return rng.choice((A.ForallObj, A.ExistsObj))(var, body)
    if roll < 0.84 and binder_depth < 1:
        var = f"Q{binder_depth}"
        body = random_assertion(
            rng, ctx, depth - 1, tuple(extra_vars) + (var,), binder_depth + 1
        )
        return rng.choice((A.ForallSet, A.ExistsSet))(var, body)
    if roll < 0.92:
        return rng.choice((A.Next, A.Will, A.Prev, A.Was))(sub())
    if roll < 0.96:
        return A.Changes(random_expr(rng, ctx, 1, extra_vars))
    sets = _set_scope(ctx, extra_vars)
    if sets:
        return A.Space(rng.choice(sets), sub())
    return A.Not(sub())


# ---------------------------------------------------------------------------
# Modules and steppable configurations (linking laws)
# ---------------------------------------------------------------------------


def random_module(rng: random.Random, prefix: str = "K") -> L.ModuleDef:
    """A small well-formed module whose methods only call methods generated
    before them, so every call chain bottoms out."""
    classes = []
    earlier: list[tuple[str, str, int]] = []  # (class, method, arity)
    for ci in range(rng.randint(1, 3)):
        cname = f"{prefix}{ci}"
        fields = tuple(f"f{j}" for j in range(rng.randint(1, 2)))
        methods = []
        for mi in range(rng.randint(1, 2)):
            mname = f"m{mi}"
            params = tuple(f"p{j}" for j in range(rng.randint(0, 2)))
            scope = ["this"] + list(params)
            body: list[L.Stmt] = []
            for _ in range(rng.randint(1, 3)):
                kind = rng.random()
                if kind < 0.35:
                    tgt = f"t{len(body)}"
                    body.append(L.FieldRead(tgt, "this", rng.choice(fields)))
                    scope.append(tgt)
                elif kind < 0.6:
                    body.append(
                        L.FieldWrite("this", rng.choice(fields), L.Var(rng.choice(scope)))
                    )
                elif kind < 0.8 and earlier:
                    ecls, emeth, arity = rng.choice(earlier)
                    tgt = f"t{len(body)}"
                    args = tuple(L.Var(rng.choice(scope)) for _ in range(arity))
                    body.append(L.Call(tgt, rng.choice(scope), emeth, args))
                    scope.append(tgt)
                elif classes:
                    tgt = f"t{len(body)}"
                    pick = rng.choice(classes)
                    nargs = rng.randint(0, len(pick.fields))
                    args = tuple(L.Var(rng.choice(scope)) for _ in range(nargs))
                    body.append(L.New(tgt, pick.name, args))
                    scope.append(tgt)
                else:
                    body.append(L.FieldWrite("this", rng.choice(fields), L.NullLit()))
            body.append(L.Return(L.Var(rng.choice(scope))))
            methods.append(L.MethodDecl(mname, params, tuple(body)))
            earlier.append((cname, mname, len(params)))
        classes.append(L.ClassDescr(cname, fields, tuple(methods), ()))
    return L.ModuleDef(tuple(classes))


def random_executable(rng: random.Random, module: L.ModuleDef) -> Config:
    """A configuration over ``module`` whose next step usually succeeds."""
    names = module.class_ids()
    n = rng.randint(2, 4)
    addrs = [Addr(i + 1) for i in range(n)]
    heap = {}
    for addr in addrs:
        cls = module.lookup(rng.choice(names))
        fields = {f: rng.choice(list(addrs) + [NULL]) for f in cls.fields}
        heap[addr] = ObjectRecord(cls.name, fields)
    this = rng.choice(addrs)
    this_cls = module.lookup(heap[this].class_id)
    vars: dict[str, Value] = {"this": this}
    for i, addr in enumerate(addrs):
        vars[f"v{i}"] = addr
    scope = list(vars)
    kind = rng.random()
    if kind < 0.3 and this_cls.fields:
        stmt: L.Stmt = L.FieldRead("t", "this", rng.choice(this_cls.fields))
    elif kind < 0.5 and this_cls.fields:
        stmt = L.FieldWrite("this", rng.choice(this_cls.fields), L.Var(rng.choice(scope)))
    elif kind < 0.75:
        recv = rng.choice(addrs)
        rcls = module.lookup(heap[recv].class_id)
        meth = rng.choice(rcls.methods)
        args = tuple(L.Var(rng.choice(scope)) for _ in meth.params)
        stmt = L.Call("t", f"v{addrs.index(recv)}", meth.name, args)
    elif kind < 0.9:
        cls = module.lookup(rng.choice(names))
        nargs = rng.randint(0, len(cls.fields))
        stmt = L.New("t", cls.name, tuple(L.Var(rng.choice(scope)) for _ in range(nargs)))
    else:
        stmt = L.Return(L.Var(rng.choice(scope)))
    tail = [L.Return(L.Var(rng.choice(scope)))]
    frame = Frame(Continuation((stmt, *tail)), vars)
    return Config((frame,), heap)
