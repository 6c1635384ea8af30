"""Assertions and their satisfaction relation.

On top of the expression layer, assertions add classical connectives,
quantification over objects (addresses in the current heap) and over sets of
objects, and five families of atoms about the shape of execution:

* permission  -- ``access(x, y)``: y is reachable from x in one of three
  ways: aliasing, a field of x, or x being the executing object with y
  named by a variable of the code it is running;
* control     -- ``calls(x, m, y, args)``: the next statement is exactly the
  call ``y.m(args)`` made by x;
* viewpoint   -- ``external(x)`` / ``internal(x)``: which side of the module
  boundary the object's class falls on;
* space       -- ``in S: A``: A judged in the configuration restricted to
  the objects in S;
* time        -- ``next A`` / ``will A`` look forward by running the current
  frame against the current heap, ``prev A`` / ``was A`` look back along the
  recorded history.  Either way, A is judged in the adapted configuration,
  so its free variables keep their current meaning.

Partiality is resolved classically: an atom whose ingredients are undefined
is simply false, and negation is truth-table negation.  The one exception is
set quantification over a heap larger than the enumeration cap, which cannot
be decided either way and raises BoundsExceeded; budget cutoffs inside the
temporal search leave the atom false and are recorded as caveats.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional, Union

from . import langoo as L
from .langoo import Expr, ModuleDef
from .ghosts import FUEL_EXHAUSTED, Defined, Undefined, eval_expr
from .interpreter import (
    BUDGET_EXHAUSTED,
    Bounds,
    Stuck,
    Trace,
    external_step,
)
from .runtime import (
    Addr,
    AddrSet,
    Config,
    TRUE,
    adapt,
    class_of_addr,
    fresh_name,
    interp_atom,
    interp_var,
    is_external,
    restrict,
)

# ---------------------------------------------------------------------------
# Assertion syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Wildcard:
    """Argument slot in a calls-atom that matches anything."""

    def __repr__(self) -> str:
        return "_"


WILDCARD = Wildcard()

CallArg = Union[Expr, Wildcard]


@dataclass(frozen=True)
class ExprHolds:
    expr: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Eq:
    lhs: Expr
    rhs: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class HasClass:
    expr: Expr
    class_id: str
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class In:
    expr: Expr
    set_var: str
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    lhs: "Assertion"
    rhs: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    lhs: "Assertion"
    rhs: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    lhs: "Assertion"
    rhs: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ForallObj:
    var: str
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ExistsObj:
    var: str
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ForallSet:
    var: str
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ExistsSet:
    var: str
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Access:
    of: Expr
    to: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Calls:
    caller: Expr
    method: str
    recv: Expr
    args: tuple[CallArg, ...]
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class External:
    expr: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Internal:
    expr: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Space:
    set_var: str
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Next:
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Will:
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Prev:
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Was:
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Changes:
    """Sugar: the expression has a value now and a different one (possibly
    none) in the adapted next configuration."""

    expr: Expr
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BindValue:
    """Internal binder: name the current value of an expression, then judge
    the body; false when the expression has no value.  This realizes the
    existential over values in the desugaring of ``changes`` -- the witness
    is forced, so a let-binding is the whole quantifier."""

    var: str
    expr: Expr
    body: "Assertion"
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


Assertion = Union[
    ExprHolds,
    Eq,
    HasClass,
    In,
    Not,
    And,
    Or,
    Implies,
    ForallObj,
    ExistsObj,
    ForallSet,
    ExistsSet,
    Access,
    Calls,
    External,
    Internal,
    Space,
    Next,
    Will,
    Prev,
    Was,
    Changes,
    BindValue,
]

_BINDERS = (ForallObj, ExistsObj, ForallSet, ExistsSet)


@dataclass(frozen=True)
class NamedAssertion:
    name: str
    body: Assertion
    span: Optional[L.SourceSpan] = dc_field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Spec:
    """A named collection of assertions, each checked at every visible
    configuration of a run."""

    name: str
    assertions: tuple[NamedAssertion, ...]

    def __post_init__(self):
        names = [na.name for na in self.assertions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate assertion names in spec {self.name!r}")

    def lookup(self, name: str) -> NamedAssertion:
        for na in self.assertions:
            if na.name == name:
                return na
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Variable plumbing
# ---------------------------------------------------------------------------


def assertion_vars(a: Assertion) -> Iterator[str]:
    """Every variable name occurring in ``a``, bound or free."""
    if isinstance(a, (ExprHolds, Changes)):
        yield from L.expr_vars(a.expr)
    elif isinstance(a, Eq):
        yield from L.expr_vars(a.lhs)
        yield from L.expr_vars(a.rhs)
    elif isinstance(a, HasClass):
        yield from L.expr_vars(a.expr)
    elif isinstance(a, In):
        yield from L.expr_vars(a.expr)
        yield a.set_var
    elif isinstance(a, Not):
        yield from assertion_vars(a.body)
    elif isinstance(a, (And, Or, Implies)):
        yield from assertion_vars(a.lhs)
        yield from assertion_vars(a.rhs)
    elif isinstance(a, _BINDERS):
        yield a.var
        yield from assertion_vars(a.body)
    elif isinstance(a, Access):
        yield from L.expr_vars(a.of)
        yield from L.expr_vars(a.to)
    elif isinstance(a, Calls):
        yield from L.expr_vars(a.caller)
        yield from L.expr_vars(a.recv)
        for arg in a.args:
            if not isinstance(arg, Wildcard):
                yield from L.expr_vars(arg)
    elif isinstance(a, (External, Internal)):
        yield from L.expr_vars(a.expr)
    elif isinstance(a, Space):
        yield a.set_var
        yield from assertion_vars(a.body)
    elif isinstance(a, (Next, Will, Prev, Was)):
        yield from assertion_vars(a.body)
    elif isinstance(a, BindValue):
        yield a.var
        yield from L.expr_vars(a.expr)
        yield from assertion_vars(a.body)
    else:
        raise TypeError(f"not an assertion: {a!r}")


def subst_expr(e: Expr, old: str, new: str) -> Expr:
    if isinstance(e, L.Var):
        return L.Var(new) if e.name == old else e
    if isinstance(e, L.Eq):
        return L.Eq(subst_expr(e.lhs, old, new), subst_expr(e.rhs, old, new))
    if isinstance(e, L.If):
        return L.If(
            subst_expr(e.cond, old, new),
            subst_expr(e.then, old, new),
            subst_expr(e.orelse, old, new),
        )
    if isinstance(e, L.FieldSel):
        return L.FieldSel(subst_expr(e.target, old, new), e.name)
    if isinstance(e, L.GhostCall):
        return L.GhostCall(
            subst_expr(e.target, old, new),
            e.name,
            tuple(subst_expr(a, old, new) for a in e.args),
        )
    if isinstance(e, L.Plus):
        return L.Plus(subst_expr(e.lhs, old, new), subst_expr(e.rhs, old, new))
    if isinstance(e, L.Geq):
        return L.Geq(subst_expr(e.lhs, old, new), subst_expr(e.rhs, old, new))
    return e


def subst(a: Assertion, old: str, new: str) -> Assertion:
    """Rename free occurrences of variable ``old`` to ``new``."""

    def s(x: Assertion) -> Assertion:
        return subst(x, old, new)

    def se(x: Expr) -> Expr:
        return subst_expr(x, old, new)

    if isinstance(a, ExprHolds):
        return ExprHolds(se(a.expr))
    if isinstance(a, Changes):
        return Changes(se(a.expr))
    if isinstance(a, Eq):
        return Eq(se(a.lhs), se(a.rhs))
    if isinstance(a, HasClass):
        return HasClass(se(a.expr), a.class_id)
    if isinstance(a, In):
        return In(se(a.expr), new if a.set_var == old else a.set_var)
    if isinstance(a, Not):
        return Not(s(a.body))
    if isinstance(a, And):
        return And(s(a.lhs), s(a.rhs))
    if isinstance(a, Or):
        return Or(s(a.lhs), s(a.rhs))
    if isinstance(a, Implies):
        return Implies(s(a.lhs), s(a.rhs))
    if isinstance(a, _BINDERS):
        if a.var == old:
            return a  # shadowed; nothing free below
        return type(a)(a.var, s(a.body))
    if isinstance(a, Access):
        return Access(se(a.of), se(a.to))
    if isinstance(a, Calls):
        return Calls(
            se(a.caller),
            a.method,
            se(a.recv),
            tuple(arg if isinstance(arg, Wildcard) else se(arg) for arg in a.args),
        )
    if isinstance(a, External):
        return External(se(a.expr))
    if isinstance(a, Internal):
        return Internal(se(a.expr))
    if isinstance(a, Space):
        return Space(new if a.set_var == old else a.set_var, s(a.body))
    if isinstance(a, Next):
        return Next(s(a.body))
    if isinstance(a, Will):
        return Will(s(a.body))
    if isinstance(a, Prev):
        return Prev(s(a.body))
    if isinstance(a, Was):
        return Was(s(a.body))
    if isinstance(a, BindValue):
        if a.var == old:
            return BindValue(a.var, se(a.expr), a.body)
        return BindValue(a.var, se(a.expr), s(a.body))
    raise TypeError(f"not an assertion: {a!r}")


def desugar_changes(a: Changes) -> BindValue:
    """``changes(e)`` becomes: bind v to the value of e, then next the value
    of e is no longer v.  The binder is fresh with respect to e."""
    used = set(L.expr_vars(a.expr))
    v = "v" if "v" not in used else fresh_name("v", used)
    return BindValue(v, a.expr, Next(Not(Eq(a.expr, L.Var(v)))))


# ---------------------------------------------------------------------------
# Evaluation context
# ---------------------------------------------------------------------------


class BoundsExceeded(Exception):
    """Set quantification over a heap larger than the enumeration cap; the
    verdict cannot be computed in either direction."""


@dataclass
class EvalContext:
    """Where and against what an assertion is judged.

    ``history`` is the chain of configurations leading to the one under
    judgment (its last element).  Descending through a temporal operator
    extends or trims it, so past operators nested under future ones see the
    run up to their own anchor.  ``caveats`` accumulates budget-cutoff notes
    across the whole evaluation; it never influences a verdict.
    """

    internal: ModuleDef
    external: ModuleDef
    history: tuple[Config, ...]
    bounds: Bounds
    caveats: list[str]
    anchor: Optional[int] = None  # trace position, for messages only

    @staticmethod
    def at(trace: Trace, position: int, bounds: Optional[Bounds] = None) -> "EvalContext":
        if not 0 <= position < len(trace.externals):
            raise IndexError(f"no configuration at position {position}")
        return EvalContext(
            internal=trace.internal,
            external=trace.external,
            history=trace.externals[: position + 1],
            bounds=bounds if bounds is not None else trace.bounds,
            caveats=[],
            anchor=position,
        )

    @staticmethod
    def for_config(
        internal: ModuleDef,
        external: ModuleDef,
        config: Config,
        bounds: Bounds = Bounds(),
    ) -> "EvalContext":
        return EvalContext(internal, external, (config,), bounds, caveats=[])

    @property
    def current(self) -> Config:
        return self.history[-1]

    def caveat(self, message: str) -> None:
        if self.anchor is not None:
            message = f"position {self.anchor}: {message}"
        if message not in self.caveats:
            self.caveats.append(message)

    def _with_history(self, history: tuple[Config, ...]) -> "EvalContext":
        return EvalContext(
            self.internal, self.external, history, self.bounds, self.caveats, self.anchor
        )

    def with_current(self, config: Config) -> "EvalContext":
        return self._with_history(self.history[:-1] + (config,))

    def to_future(self, config: Config) -> "EvalContext":
        adapted = adapt(self.current, config)
        return self._with_history(self.history + (adapted,))

    def to_past(self, index: int) -> "EvalContext":
        adapted = adapt(self.current, self.history[index])
        return self._with_history(self.history[:index] + (adapted,))

    def eval(self, expr: Expr):
        result = eval_expr(self.internal, self.current, expr, self.bounds.fuel)
        if isinstance(result, Undefined) and result.reason == FUEL_EXHAUSTED:
            self.caveat(f"expression ran out of fuel ({self.bounds.fuel}): {result.detail}")
        return result


# ---------------------------------------------------------------------------
# Satisfaction
# ---------------------------------------------------------------------------


def sat(ctx: EvalContext, a: Assertion) -> bool:
    """Decide ``a`` at the configuration under judgment.  Total except for
    BoundsExceeded (see module docstring)."""
    if isinstance(a, ExprHolds):
        r = ctx.eval(a.expr)
        return isinstance(r, Defined) and r.value == TRUE
    if isinstance(a, Eq):
        lhs = ctx.eval(a.lhs)
        if not isinstance(lhs, Defined):
            return False
        rhs = ctx.eval(a.rhs)
        return isinstance(rhs, Defined) and lhs.value == rhs.value
    if isinstance(a, HasClass):
        r = ctx.eval(a.expr)
        if not isinstance(r, Defined) or not isinstance(r.value, Addr):
            return False
        return class_of_addr(ctx.current, r.value) == a.class_id
    if isinstance(a, In):
        r = ctx.eval(a.expr)
        if not isinstance(r, Defined):
            return False
        s = interp_var(ctx.current, a.set_var)
        return isinstance(s, AddrSet) and r.value in s
    if isinstance(a, Not):
        return not sat(ctx, a.body)
    if isinstance(a, And):
        return sat(ctx, a.lhs) and sat(ctx, a.rhs)
    if isinstance(a, Or):
        return sat(ctx, a.lhs) or sat(ctx, a.rhs)
    if isinstance(a, Implies):
        return (not sat(ctx, a.lhs)) or sat(ctx, a.rhs)
    if isinstance(a, ForallObj):
        return all(
            _sat_bound(ctx, a.var, addr, a.body) for addr in ctx.current.heap
        )
    if isinstance(a, ExistsObj):
        return any(
            _sat_bound(ctx, a.var, addr, a.body) for addr in ctx.current.heap
        )
    if isinstance(a, (ForallSet, ExistsSet)):
        subsets = _enumerate_subsets(ctx)
        if isinstance(a, ForallSet):
            return all(_sat_bound(ctx, a.var, s, a.body) for s in subsets)
        return any(_sat_bound(ctx, a.var, s, a.body) for s in subsets)
    if isinstance(a, Access):
        return _sat_access(ctx, a)
    if isinstance(a, Calls):
        return _sat_calls(ctx, a)
    if isinstance(a, External):
        cls = _class_of_expr(ctx, a.expr)
        return cls is not None and cls not in ctx.internal
    if isinstance(a, Internal):
        cls = _class_of_expr(ctx, a.expr)
        return cls is not None and cls in ctx.internal
    if isinstance(a, Space):
        s = interp_var(ctx.current, a.set_var)
        if not isinstance(s, AddrSet):
            return False
        return sat(ctx.with_current(restrict(ctx.current, s.addrs)), a.body)
    if isinstance(a, Next):
        for future in _futures(ctx):
            return sat(ctx.to_future(future), a.body)
        return False
    if isinstance(a, Will):
        return any(sat(ctx.to_future(f), a.body) for f in _futures(ctx))
    if isinstance(a, Prev):
        n = len(ctx.history)
        if n < 2:
            return False
        return sat(ctx.to_past(n - 2), a.body)
    if isinstance(a, Was):
        n = len(ctx.history)
        return any(sat(ctx.to_past(i), a.body) for i in range(n - 1))
    if isinstance(a, Changes):
        return sat(ctx, desugar_changes(a))
    if isinstance(a, BindValue):
        r = ctx.eval(a.expr)
        if not isinstance(r, Defined):
            return False
        return _sat_bound(ctx, a.var, r.value, a.body)
    raise TypeError(f"not an assertion: {a!r}")


def _sat_bound(ctx: EvalContext, var: str, value, body: Assertion) -> bool:
    """Judge ``body`` with ``var`` bound to ``value``.  The binding lives in
    the top frame under a name fresh for both the frame and the body, and
    the body is renamed to match, so program variables cannot be captured."""
    if isinstance(value, frozenset):
        value = AddrSet(value)
    taken = set(ctx.current.top.vars) | set(assertion_vars(body)) | {var}
    fresh = fresh_name(var, taken)
    bound = ctx.with_current(ctx.current.bind_top(fresh, value))
    return sat(bound, subst(body, var, fresh))


def _enumerate_subsets(ctx: EvalContext) -> Iterator[frozenset[Addr]]:
    addrs = sorted(ctx.current.heap)
    if len(addrs) > ctx.bounds.set_cap:
        raise BoundsExceeded(
            f"set quantifier over {len(addrs)} objects exceeds cap {ctx.bounds.set_cap}"
        )
    for mask in range(1 << len(addrs)):
        yield frozenset(a for i, a in enumerate(addrs) if mask >> i & 1)


def _class_of_expr(ctx: EvalContext, e: Expr) -> Optional[str]:
    r = ctx.eval(e)
    if not isinstance(r, Defined) or not isinstance(r.value, Addr):
        return None
    return class_of_addr(ctx.current, r.value)


def _sat_access(ctx: EvalContext, a: Access) -> bool:
    of = ctx.eval(a.of)
    to = ctx.eval(a.to)
    if not isinstance(of, Defined) or not isinstance(to, Defined):
        return False
    if not isinstance(of.value, Addr) or not isinstance(to.value, Addr):
        return False
    if of.value == to.value:
        return True
    record = ctx.current.heap.get(of.value)
    if record is not None and any(v == to.value for v in record.fields.values()):
        return True
    this = interp_var(ctx.current, "this")
    if this is not None and of.value == this:
        for name in dict.fromkeys(ctx.current.top.contn.variables()):
            if interp_var(ctx.current, name) == to.value:
                return True
    return False


def _sat_calls(ctx: EvalContext, a: Calls) -> bool:
    stmts = ctx.current.top.contn.stmts
    if not stmts or not isinstance(stmts[0], L.Call):
        return False
    head = stmts[0]
    if head.method != a.method or len(head.args) != len(a.args):
        return False
    caller = ctx.eval(a.caller)
    this = interp_var(ctx.current, "this")
    if not isinstance(caller, Defined) or this is None or caller.value != this:
        return False
    recv = ctx.eval(a.recv)
    head_recv = interp_var(ctx.current, head.recv)
    if not isinstance(recv, Defined) or head_recv is None or recv.value != head_recv:
        return False
    for spec_arg, prog_arg in zip(a.args, head.args):
        if isinstance(spec_arg, Wildcard):
            continue
        want = ctx.eval(spec_arg)
        got = interp_atom(ctx.current, prog_arg)
        if not isinstance(want, Defined) or got is None or want.value != got:
            return False
    return True


def _futures(ctx: EvalContext) -> Iterator[Config]:
    """Successive visible configurations reachable by running the current
    frame against the current heap.  A single-frame stack cannot return past
    itself, so this is the future of the frame, not of the whole run."""
    cur = ctx.current
    cfg = Config((cur.top,), cur.heap)
    if not is_external(cfg, ctx.internal):
        ctx.caveat("temporal operator judged at an internal configuration")
        return
    total = 0
    while True:
        left = ctx.bounds.max_steps - total
        if left <= 0:
            ctx.caveat(f"future search cut off after {ctx.bounds.max_steps} steps")
            return
        st = external_step(
            ctx.internal, ctx.external, cfg, min(ctx.bounds.max_micro, left)
        )
        total += st.micro
        if st.config is None:
            if isinstance(st.halt, Stuck) and st.halt.reason == BUDGET_EXHAUSTED:
                ctx.caveat(f"future search cut off: {st.halt.detail}")
            return
        yield st.config
        cfg = st.config
