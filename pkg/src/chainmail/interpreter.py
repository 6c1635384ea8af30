"""Small-step execution.

``step`` applies exactly one of the five statement rules under a single
module.  On top of it, ``external_step`` gives the two-module view: from a
configuration whose executing object lies outside the internal module, run
under the link of both modules until control next rests with an external
object, hiding the internal burst in between.  ``record_trace`` iterates
that from the initial configuration and keeps every visible configuration.

Execution is deterministic; budgets (total steps, per-burst steps) are the
only way a run is cut short, and that is reported as its own stuck reason,
never silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Union

from . import langoo as L
from .langoo import ModuleDef, Stmt, link
from .runtime import (
    NULL,
    Addr,
    Config,
    Continuation,
    Frame,
    ObjectRecord,
    Value,
    class_of,
    interp_atom,
    interp_var,
    is_external,
)

# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    """Budgets for everything that could otherwise run forever."""

    max_steps: int = 100_000  # total small steps per recorded run or future search
    max_micro: int = 10_000  # small steps inside one internal burst
    fuel: int = 1_000  # ghost-call unfoldings per expression evaluation
    set_cap: int = 12  # heap size limit for set-quantifier enumeration

    def to_json(self) -> dict:
        return {
            "max_steps": self.max_steps,
            "max_micro": self.max_micro,
            "fuel": self.fuel,
            "set_cap": self.set_cap,
        }


# ---------------------------------------------------------------------------
# Step outcomes
# ---------------------------------------------------------------------------

# machine-readable stuck reasons
NO_SUCH_CLASS = "no-such-class"
NO_SUCH_METHOD = "no-such-method"
ARITY_MISMATCH = "arity-mismatch"
BAD_RECEIVER = "bad-receiver"
UNBOUND_NAME = "unbound-name"
MISSING_FIELD = "missing-field"
UNDECLARED_FIELD = "undeclared-field"
ENCAPSULATION_VIOLATION = "encapsulation-violation"
MARKER_MISMATCH = "marker-mismatch"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class Stepped:
    config: Config


@dataclass(frozen=True)
class Terminated:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str
    detail: str = ""


StepOutcome = Union[Stepped, Terminated, Stuck]

TERMINATED = Terminated()


# ---------------------------------------------------------------------------
# One small step
# ---------------------------------------------------------------------------


def step(module: ModuleDef, config: Config) -> StepOutcome:
    """Apply one statement rule under ``module``.  Field reads and writes
    insist that the executing object and the touched object share a class;
    anything that matches no rule comes back as Stuck with a reason."""
    frame = config.top
    stmts = frame.contn.stmts
    if not stmts:
        return TERMINATED
    head, rest = stmts[0], stmts[1:]
    tail = Continuation(rest)

    if isinstance(head, L.Call):
        return _step_call(module, config, head, tail)
    if isinstance(head, L.FieldRead):
        return _step_field_read(config, head, tail)
    if isinstance(head, L.FieldWrite):
        return _step_field_write(module, config, head, tail)
    if isinstance(head, L.New):
        return _step_new(module, config, head, tail)
    if isinstance(head, L.Return):
        return _step_return(config, head)
    return Stuck(NO_SUCH_METHOD, f"unrecognized statement {head!r}")


def _addr_of(config: Config, name: str):
    """Address a variable denotes, or a Stuck explaining why there is none."""
    v = interp_var(config, name)
    if v is None:
        return Stuck(UNBOUND_NAME, f"variable {name} is unbound")
    if not isinstance(v, Addr):
        return Stuck(BAD_RECEIVER, f"{name} holds {v!r}, not an address")
    if v not in config.heap:
        return Stuck(BAD_RECEIVER, f"{name} holds dangling address {v!r}")
    return v


def _step_call(module: ModuleDef, config: Config, s: L.Call, tail: Continuation) -> StepOutcome:
    recv = _addr_of(config, s.recv)
    if isinstance(recv, Stuck):
        return recv
    cls = config.heap[recv].class_id
    decl = L.lookup_method(module, cls, s.method)
    if decl is None:
        return Stuck(NO_SUCH_METHOD, f"class {cls} has no method {s.method}")
    if len(decl.params) != len(s.args):
        return Stuck(
            ARITY_MISMATCH,
            f"{cls}.{s.method} takes {len(decl.params)} arguments, got {len(s.args)}",
        )
    bindings: dict[str, Value] = {"this": recv}
    for p, a in zip(decl.params, s.args):
        v = interp_atom(config, a)
        if v is None:
            return Stuck(UNBOUND_NAME, f"argument {getattr(a, 'name', a)!r} is unbound")
        bindings[p] = v
    caller = config.top.with_contn(Continuation(tail.stmts, marker=s.target))
    callee = Frame(Continuation(decl.body), bindings)
    return Stepped(config.with_top(caller).push(callee))


def _step_field_read(config: Config, s: L.FieldRead, tail: Continuation) -> StepOutcome:
    obj = _addr_of(config, s.obj)
    if isinstance(obj, Stuck):
        return obj
    own = class_of(config, "this")
    cls = config.heap[obj].class_id
    if own is None or own != cls:
        return Stuck(
            ENCAPSULATION_VIOLATION,
            f"object of class {own} reads field {s.field} of class {cls}",
        )
    value = config.heap[obj].fields.get(s.field)
    if value is None:
        return Stuck(MISSING_FIELD, f"object {obj!r} has no field {s.field}")
    new_top = Frame(tail, {**config.top.vars, s.target: value})
    return Stepped(config.with_top(new_top))


def _step_field_write(
    module: ModuleDef, config: Config, s: L.FieldWrite, tail: Continuation
) -> StepOutcome:
    obj = _addr_of(config, s.obj)
    if isinstance(obj, Stuck):
        return obj
    own = class_of(config, "this")
    record = config.heap[obj]
    if own is None or own != record.class_id:
        return Stuck(
            ENCAPSULATION_VIOLATION,
            f"object of class {own} writes field {s.field} of class {record.class_id}",
        )
    descr = module.lookup(record.class_id)
    declared = descr.fields if descr is not None else tuple(record.fields)
    if s.field not in declared:
        return Stuck(
            UNDECLARED_FIELD, f"class {record.class_id} declares no field {s.field}"
        )
    value = interp_atom(config, s.value)
    if value is None:
        return Stuck(UNBOUND_NAME, f"variable {s.value.name} is unbound")
    updated = config.heap_set(obj, record.with_field(s.field, value))
    return Stepped(updated.with_top(updated.top.with_contn(tail)))


def _step_new(module: ModuleDef, config: Config, s: L.New, tail: Continuation) -> StepOutcome:
    descr = module.lookup(s.class_id)
    if descr is None:
        return Stuck(NO_SUCH_CLASS, f"no class {s.class_id} in scope")
    if len(s.args) > len(descr.fields):
        return Stuck(
            ARITY_MISMATCH,
            f"new {s.class_id} takes at most {len(descr.fields)} arguments, got {len(s.args)}",
        )
    fields: dict[str, Value] = {}
    for i, fname in enumerate(descr.fields):
        if i < len(s.args):
            v = interp_atom(config, s.args[i])
            if v is None:
                return Stuck(
                    UNBOUND_NAME, f"argument {getattr(s.args[i], 'name', s.args[i])!r} is unbound"
                )
            fields[fname] = v
        else:
            fields[fname] = NULL
    addr = config.fresh_addr()
    allocated = config.heap_set(addr, ObjectRecord(s.class_id, fields))
    new_top = Frame(tail, {**allocated.top.vars, s.target: addr})
    return Stepped(allocated.with_top(new_top))


def _step_return(config: Config, s: L.Return) -> StepOutcome:
    value = interp_atom(config, s.value)
    if value is None:
        return Stuck(UNBOUND_NAME, f"variable {s.value.name} is unbound")
    if len(config.stack) == 1:
        return TERMINATED
    below = config.stack[-2]
    if below.contn.marker is None:
        return Stuck(MARKER_MISMATCH, "caller frame has no pending call")
    resumed = Frame(
        Continuation(below.contn.stmts),
        {**below.vars, below.contn.marker: value},
    )
    return Stepped(config.pop_to(resumed))


# ---------------------------------------------------------------------------
# Budgeted runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    config: Config
    outcome: StepOutcome  # Terminated or Stuck, never Stepped
    steps: int


def run(module: ModuleDef, config: Config, max_steps: int) -> RunResult:
    """Step until the program halts or the budget runs out."""
    cur = config
    for n in range(max_steps):
        out = step(module, cur)
        if isinstance(out, Stepped):
            cur = out.config
            continue
        return RunResult(cur, out, n)
    return RunResult(cur, Stuck(BUDGET_EXHAUSTED, f"gave up after {max_steps} steps"), max_steps)


# ---------------------------------------------------------------------------
# Initial configuration
# ---------------------------------------------------------------------------


def initial(driver: Sequence[Stmt]) -> Config:
    """Single frame binding only ``this`` to a fresh featureless object; the
    driver statements are the continuation."""
    origin = Addr(0)
    frame = Frame(Continuation(tuple(driver)), {"this": origin})
    return Config((frame,), {origin: ObjectRecord(L.RESERVED_CLASS, {})})


# ---------------------------------------------------------------------------
# Two-module (visible-state) execution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExternalStep:
    """Result of one visible step: the next external configuration plus the
    hidden internal burst crossed to reach it, or a halt."""

    config: Optional[Config]
    interior: tuple[Config, ...]
    micro: int
    halt: Optional[StepOutcome]  # Terminated or Stuck when config is None


def external_step(
    internal: ModuleDef, external: ModuleDef, config: Config, max_micro: int
) -> ExternalStep:
    """From an external configuration, run under the linked modules to the
    next external configuration.  All strictly interior configurations must
    be internal, which pins the result to the first external successor."""
    if not is_external(config, internal):
        raise ValueError("external_step requires an external configuration")
    linked = link(internal, external)
    interior: list[Config] = []
    cur = config
    micro = 0
    while True:
        if micro >= max_micro:
            return ExternalStep(
                None,
                tuple(interior),
                micro,
                Stuck(BUDGET_EXHAUSTED, f"burst exceeded {max_micro} steps"),
            )
        out = step(linked, cur)
        micro += 1
        if not isinstance(out, Stepped):
            return ExternalStep(None, tuple(interior), micro, out)
        cur = out.config
        if is_external(cur, internal):
            return ExternalStep(cur, tuple(interior), micro, None)
        interior.append(cur)


# ---------------------------------------------------------------------------
# Recorded traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trace:
    """Everything a recorded run exposes: the visible configurations, the
    hidden bursts between them, and how the run ended."""

    internal: ModuleDef
    external: ModuleDef
    externals: tuple[Config, ...]
    interiors: tuple[tuple[Config, ...], ...]
    outcome: StepOutcome  # Terminated or Stuck
    micro_total: int
    bounds: Bounds

    def __len__(self) -> int:
        return len(self.externals)

    @property
    def truncated(self) -> bool:
        return isinstance(self.outcome, Stuck) and self.outcome.reason == BUDGET_EXHAUSTED


def record_trace(
    internal: ModuleDef,
    external: ModuleDef,
    driver: Sequence[Stmt],
    bounds: Bounds = Bounds(),
) -> Trace:
    start = initial(driver)
    externals = [start]
    interiors: list[tuple[Config, ...]] = []
    total = 0
    outcome: StepOutcome = TERMINATED
    cur = start
    while True:
        remaining = bounds.max_steps - total
        if remaining <= 0:
            outcome = Stuck(BUDGET_EXHAUSTED, f"run exceeded {bounds.max_steps} steps")
            break
        st = external_step(internal, external, cur, min(bounds.max_micro, remaining))
        total += st.micro
        if st.config is None:
            outcome = st.halt
            break
        externals.append(st.config)
        interiors.append(st.interior)
        cur = st.config
    return Trace(
        internal=internal,
        external=external,
        externals=tuple(externals),
        interiors=tuple(interiors),
        outcome=outcome,
        micro_total=total,
        bounds=bounds,
    )


# ---------------------------------------------------------------------------
# Static validation (run before execution by the command line)
# ---------------------------------------------------------------------------


def validate_program(module: ModuleDef, driver: Sequence[Stmt] = ()) -> list[str]:
    """Constructor-arity problems that are certain failures at run time:
    more arguments than the class declares fields.  Returns messages, empty
    when fine."""
    problems = []

    def check(stmts, where):
        for s in stmts:
            if isinstance(s, L.New):
                descr = module.lookup(s.class_id)
                if descr is not None and len(s.args) > len(descr.fields):
                    at = f" at {s.span}" if s.span else ""
                    problems.append(
                        f"{where}{at}: new {s.class_id} takes at most "
                        f"{len(descr.fields)} arguments, got {len(s.args)}"
                    )

    for c in module.classes:
        for m in c.methods:
            check(m.body, f"{c.name}.{m.name}")
    check(driver, "driver")
    return problems
