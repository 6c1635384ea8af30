"""Per-run checking of a spec against a recorded trace, with witness
reporting, plus the randomized law suites backing the logic.

A run can only ever show the absence of violations on itself; the verdict
status is deliberately "no-violation-found", never anything stronger.
Violations come with witnesses: the position, the assertion name, and the
bindings under which a residual piece of the assertion evaluates to false.
Witnesses replay: re-running the evaluation reproduces the failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence, Union

from . import assertions as A
from . import langoo as L
from .assertions import (
    BoundsExceeded,
    EvalContext,
    NamedAssertion,
    Spec,
    _enumerate_subsets,
    _sat_bound,
    sat,
)
from .ghosts import Defined
from .interpreter import Bounds, Stepped, Trace, record_trace, step
from .langoo import ModuleDef, OverlapError, link, modules_equal
from .printer import print_assertion
from .runtime import AddrSet, Value, value_to_json
from .samplers import (
    random_assertion,
    random_context,
    random_executable,
    random_module,
)

NO_VIOLATION_FOUND = "no-violation-found"
VIOLATED = "violated"
WITHHELD = "withheld"

EXIT_CODES = {NO_VIOLATION_FOUND: 0, VIOLATED: 1, WITHHELD: 2}


@dataclass(frozen=True)
class Witness:
    """Where and how an assertion failed.  ``residual`` is the innermost
    sub-assertion shown false under ``bindings``; it stays in memory for
    replay and is rendered only through the assertion text."""

    position: int
    assertion: str
    bindings: dict[str, Value]
    caveats: tuple[str, ...] = ()
    residual: Optional[A.Assertion] = dc_field(default=None, compare=False)

    def to_json(self) -> dict:
        return {
            "position": self.position,
            "assertion": self.assertion,
            "bindings": {k: value_to_json(v) for k, v in self.bindings.items()},
            "caveats": list(self.caveats),
        }


@dataclass(frozen=True)
class Verdict:
    status: str
    witnesses: tuple[Witness, ...]
    caveats: tuple[str, ...]
    seeds: dict[str, int]
    bounds: Bounds

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witnesses": [w.to_json() for w in self.witnesses],
            "caveats": list(self.caveats),
            "seeds": dict(self.seeds),
            "bounds": self.bounds.to_json(),
        }


def check_trace(
    trace: Trace,
    spec: Spec,
    bounds: Optional[Bounds] = None,
    seeds: Optional[dict[str, int]] = None,
) -> Verdict:
    """Evaluate every named assertion at every visible position.  A false
    assertion yields a witness; a set quantifier too big for the cap makes
    the whole verdict withheld (unless an outright violation was also
    found, which stands on its own)."""
    bounds = bounds if bounds is not None else trace.bounds
    witnesses: list[Witness] = []
    caveats: list[str] = []
    withheld = False

    def note(msg: str) -> None:
        if msg not in caveats:
            caveats.append(msg)

    for position in range(len(trace.externals)):
        for na in spec.assertions:
            ctx = EvalContext.at(trace, position, bounds)
            try:
                ok = sat(ctx, na.body)
            except BoundsExceeded as exc:
                withheld = True
                note(f"{na.name}: position {position}: withheld: {exc}")
                continue
            for msg in ctx.caveats:
                note(f"{na.name}: {msg}")
            if not ok:
                bindings, residual = explain_failure(ctx, na.body)
                witnesses.append(
                    Witness(
                        position,
                        na.name,
                        bindings,
                        tuple(f"{na.name}: {m}" for m in ctx.caveats),
                        residual,
                    )
                )
    if trace.truncated:
        note(f"trace truncated: {trace.outcome.detail}")
    witnesses.sort(key=lambda w: (w.position, w.assertion))
    if witnesses:
        status = VIOLATED
    elif withheld:
        status = WITHHELD
    else:
        status = NO_VIOLATION_FOUND
    return Verdict(status, tuple(witnesses), tuple(caveats), seeds or {}, bounds)


def check_run(
    internal: ModuleDef,
    external: ModuleDef,
    driver: Sequence[L.Stmt],
    spec: Spec,
    bounds: Bounds = Bounds(),
    seeds: Optional[dict[str, int]] = None,
) -> Verdict:
    """Record a run of ``driver`` against the linked modules and check the
    spec along it.  Linking problems surface here, before any execution."""
    link(internal, external)
    trace = record_trace(internal, external, driver, bounds)
    return check_trace(trace, spec, bounds, seeds)


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------


def explain_failure(
    ctx: EvalContext, a: A.Assertion
) -> tuple[dict[str, Value], A.Assertion]:
    """Descend into a false assertion, instantiating universal binders with
    a failing element, until no further blame can be assigned.  Returns the
    collected bindings and the residual false sub-assertion.

    Every descent is validated: the residual really is false once the
    bindings are installed in the frame, so a witness can be replayed by
    rebinding and re-running sat."""
    try:
        if isinstance(a, (A.ForallObj, A.ForallSet)):
            candidates = (
                list(ctx.current.heap)
                if isinstance(a, A.ForallObj)
                else [AddrSet(s) for s in _enumerate_subsets(ctx)]
            )
            for cand in candidates:
                if _sat_bound(ctx, a.var, cand, a.body):
                    continue
                down = ctx.with_current(ctx.current.bind_top(a.var, cand))
                if sat(down, a.body):
                    break  # direct binding disagrees (name collision); stop here
                bindings, residual = explain_failure(down, a.body)
                return {a.var: cand, **bindings}, residual
            return {}, a
        if isinstance(a, A.And):
            if not sat(ctx, a.lhs):
                return explain_failure(ctx, a.lhs)
            return explain_failure(ctx, a.rhs)
        if isinstance(a, A.Implies):
            return explain_failure(ctx, a.rhs)
        if isinstance(a, A.BindValue):
            r = ctx.eval(a.expr)
            if isinstance(r, Defined):
                down = ctx.with_current(ctx.current.bind_top(a.var, r.value))
                if not sat(down, a.body):
                    bindings, residual = explain_failure(down, a.body)
                    return {a.var: r.value, **bindings}, residual
            return {}, a
    except BoundsExceeded:
        return {}, a
    return {}, a


def replay_witness(trace: Trace, spec: Spec, witness: Witness) -> bool:
    """Re-derive the failure a witness records: the full named assertion is
    false at the position, and the residual is false under the bindings."""
    na = spec.lookup(witness.assertion)
    ctx = EvalContext.at(trace, witness.position)
    try:
        if sat(ctx, na.body):
            return False
        if witness.residual is None:
            return True
        cur = ctx.current
        for name, value in witness.bindings.items():
            cur = cur.bind_top(name, value)
        return not sat(ctx.with_current(cur), witness.residual)
    except BoundsExceeded:
        return False


def judgment_grid(
    trace: Trace, spec: Spec, bounds: Optional[Bounds] = None
) -> list[tuple[int, str, str]]:
    """One cell per (position, assertion): "ok", "violated", or "withheld".
    This is what the delimited and figure outputs render."""
    bounds = bounds if bounds is not None else trace.bounds
    rows = []
    for position in range(len(trace.externals)):
        for na in spec.assertions:
            ctx = EvalContext.at(trace, position, bounds)
            try:
                cell = "ok" if sat(ctx, na.body) else "violated"
            except BoundsExceeded:
                cell = "withheld"
            rows.append((position, na.name, cell))
    return rows


def internal_findings(
    trace: Trace, spec: Spec, bounds: Optional[Bounds] = None, limit: int = 20
) -> list[str]:
    """Judge the assertions at the hidden interior configurations too.
    These are debugging aids only: the satisfaction relation is defined at
    visible configurations, so nothing here affects the verdict."""
    bounds = bounds if bounds is not None else trace.bounds
    findings: list[str] = []
    for i, burst in enumerate(trace.interiors):
        for j, cfg in enumerate(burst):
            for na in spec.assertions:
                ctx = EvalContext.for_config(trace.internal, trace.external, cfg, bounds)
                try:
                    ok = sat(ctx, na.body)
                except BoundsExceeded:
                    ok = None
                if ok is None:
                    findings.append(
                        f"[internal] {na.name}: withheld at micro-config {j} after position {i}"
                    )
                elif not ok:
                    findings.append(
                        f"[internal] {na.name}: false at micro-config {j} after position {i}"
                        " (non-semantic)"
                    )
                if len(findings) >= limit:
                    findings.append("[internal] further findings suppressed")
                    return findings
    return findings


# ---------------------------------------------------------------------------
# Randomized suites
# ---------------------------------------------------------------------------

Builder = Callable[[EvalContext, random.Random], A.Assertion]


@dataclass(frozen=True)
class LawReport:
    law: str
    trials: int
    failures: tuple[str, ...]
    seed: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "trials": self.trials,
            "failures": list(self.failures),
            "seed": self.seed,
        }


def _sat_or_withheld(ctx: EvalContext, a: A.Assertion):
    try:
        return sat(ctx, a)
    except BoundsExceeded:
        return WITHHELD


def check_equivalence(
    lhs: Union[A.Assertion, Builder],
    rhs: Union[A.Assertion, Builder],
    sampler: Callable[[random.Random], EvalContext] = random_context,
    trials: int = 500,
    seed: int = 0,
    law: str = "equivalence",
) -> LawReport:
    """Sample contexts and compare satisfaction of the two sides.  Builders
    are called with a per-instance twin generator: both sides see the same
    draws, so schematic metavariables coincide."""
    rng = random.Random(seed)
    failures = []
    for i in range(trials):
        ctx = sampler(rng)
        instance_seed = rng.getrandbits(32)
        a1 = lhs(ctx, random.Random(instance_seed)) if callable(lhs) else lhs
        a2 = rhs(ctx, random.Random(instance_seed)) if callable(rhs) else rhs
        r1 = _sat_or_withheld(ctx, a1)
        r2 = _sat_or_withheld(ctx, a2)
        if r1 != r2:
            failures.append(
                f"trial {i}: {print_assertion(a1)} is {r1} "
                f"but {print_assertion(a2)} is {r2}"
            )
    return LawReport(law, trials, tuple(failures), seed)


def _draw(depth: int = 2, extra: tuple[str, ...] = ()) -> Builder:
    return lambda ctx, rng: random_assertion(rng, ctx, depth, extra)


def _equivalence_laws() -> list[tuple[str, Builder, Builder]]:
    g = _draw()

    def qbody(var: str) -> Builder:
        return _draw(2, (var,))

    return [
        ("contradiction is false",
         lambda c, r: (lambda x: A.And(x, A.Not(x)))(g(c, r)),
         A.ExprHolds(L.FalseLit())),
        ("excluded middle is true",
         lambda c, r: (lambda x: A.Or(x, A.Not(x)))(g(c, r)),
         A.ExprHolds(L.TrueLit())),
        ("conjunction commutes",
         lambda c, r: A.And(g(c, r), g(c, r)),
         lambda c, r: A.And(*(g(c, r), g(c, r))[::-1])),
        ("disjunction commutes",
         lambda c, r: A.Or(g(c, r), g(c, r)),
         lambda c, r: A.Or(*(g(c, r), g(c, r))[::-1])),
        ("disjunction associates",
         lambda c, r: A.Or(g(c, r), A.Or(g(c, r), g(c, r))),
         lambda c, r: (lambda x, y, z: A.Or(A.Or(x, y), z))(g(c, r), g(c, r), g(c, r))),
        ("conjunction distributes over disjunction",
         lambda c, r: A.And(g(c, r), A.Or(g(c, r), g(c, r))),
         lambda c, r: (lambda x, y, z: A.Or(A.And(x, y), A.And(x, z)))(
             g(c, r), g(c, r), g(c, r))),
        ("disjunction distributes over conjunction",
         lambda c, r: A.Or(g(c, r), A.And(g(c, r), g(c, r))),
         lambda c, r: (lambda x, y, z: A.And(A.Or(x, y), A.Or(x, z)))(
             g(c, r), g(c, r), g(c, r))),
        ("negated conjunction",
         lambda c, r: A.Not(A.And(g(c, r), g(c, r))),
         lambda c, r: A.Or(A.Not(g(c, r)), A.Not(g(c, r)))),
        ("negated disjunction",
         lambda c, r: A.Not(A.Or(g(c, r), g(c, r))),
         lambda c, r: A.And(A.Not(g(c, r)), A.Not(g(c, r)))),
        ("negated forall-object",
         lambda c, r: A.Not(A.ForallObj("q", qbody("q")(c, r))),
         lambda c, r: A.ExistsObj("q", A.Not(qbody("q")(c, r)))),
        ("negated exists-object",
         lambda c, r: A.Not(A.ExistsObj("q", qbody("q")(c, r))),
         lambda c, r: A.ForallObj("q", A.Not(qbody("q")(c, r)))),
        ("negated forall-set",
         lambda c, r: A.Not(A.ForallSet("Q", qbody("Q")(c, r))),
         lambda c, r: A.ExistsSet("Q", A.Not(qbody("Q")(c, r)))),
        ("negated exists-set",
         lambda c, r: A.Not(A.ExistsSet("Q", qbody("Q")(c, r))),
         lambda c, r: A.ForallSet("Q", A.Not(qbody("Q")(c, r)))),
    ]


def run_equivalence_suite(trials: int = 500, seed: int = 0) -> list[LawReport]:
    reports = []
    for offset, (name, lhs, rhs) in enumerate(_equivalence_laws()):
        reports.append(
            check_equivalence(lhs, rhs, random_context, trials, seed + offset, name)
        )
    return reports


def _classical_laws():
    g = _draw()

    def one_of(ctx, rng):
        a = g(ctx, rng)
        return _sat_or_withheld(ctx, a) != _sat_or_withheld(ctx, A.Not(a))

    def and_means_both(ctx, rng):
        a, b = g(ctx, rng), g(ctx, rng)
        both = _sat_or_withheld(ctx, A.And(a, b))
        return both == (_sat_or_withheld(ctx, a) is True and _sat_or_withheld(ctx, b) is True)

    def or_means_either(ctx, rng):
        a, b = g(ctx, rng), g(ctx, rng)
        either = _sat_or_withheld(ctx, A.Or(a, b))
        return either == (_sat_or_withheld(ctx, a) is True or _sat_or_withheld(ctx, b) is True)

    def no_contradiction(ctx, rng):
        a = g(ctx, rng)
        return _sat_or_withheld(ctx, A.And(a, A.Not(a))) is False

    def modus_ponens(ctx, rng):
        a, b = g(ctx, rng), g(ctx, rng)
        if _sat_or_withheld(ctx, a) is True and _sat_or_withheld(ctx, A.Implies(a, b)) is True:
            return _sat_or_withheld(ctx, b) is True
        return True

    return [
        ("exactly one of A and not-A", one_of),
        ("conjunction means both hold", and_means_both),
        ("disjunction means either holds", or_means_either),
        ("no configuration satisfies A and not-A", no_contradiction),
        ("modus ponens", modus_ponens),
    ]


def run_classical_suite(trials: int = 500, seed: int = 0) -> list[LawReport]:
    reports = []
    for offset, (name, law) in enumerate(_classical_laws()):
        rng = random.Random(seed + 1000 + offset)
        failures = []
        for i in range(trials):
            ctx = random_context(rng)
            inst = random.Random(rng.getrandbits(32))
            try:
                ok = law(ctx, inst)
            except BoundsExceeded:
                ok = True
            if not ok:
                failures.append(f"trial {i} failed")
        reports.append(LawReport(name, trials, tuple(failures), seed + 1000 + offset))
    return reports


# ---------------------------------------------------------------------------
# Linking laws
# ---------------------------------------------------------------------------


def check_linking_laws(
    sampler: Callable[[random.Random, str], ModuleDef] = random_module,
    trials: int = 200,
    seed: int = 0,
) -> list[LawReport]:
    """Module linking: associative and commutative where defined, order
    independent in its failures, and inert for single steps that already go
    through."""
    rng = random.Random(seed + 2000)
    assoc_fail, comm_fail, overlap_fail = [], [], []
    for i in range(trials):
        m1 = sampler(rng, "Ka")
        m2 = sampler(rng, "Kb")
        m3 = sampler(rng, "Kc")
        if not modules_equal(link(link(m1, m2), m3), link(m1, link(m2, m3))):
            assoc_fail.append(f"trial {i}")
        if not modules_equal(link(m1, m2), link(m2, m1)):
            comm_fail.append(f"trial {i}")
        clash = sampler(rng, "Ka")
        one = two = False
        try:
            link(m1, clash)
        except OverlapError:
            one = True
        try:
            link(clash, m1)
        except OverlapError:
            two = True
        if one != two:
            overlap_fail.append(f"trial {i}: overlap detected in one order only")

    rng2 = random.Random(seed + 3000)
    step_fail = []
    stepped = 0
    for i in range(trials):
        m = sampler(rng2, "Ka")
        extra = sampler(rng2, "Kb")
        cfg = random_executable(rng2, m)
        before = step(m, cfg)
        if not isinstance(before, Stepped):
            continue
        stepped += 1
        after = step(link(m, extra), cfg)
        if not isinstance(after, Stepped) or after.config != before.config:
            step_fail.append(f"trial {i}: successor differs under linking")
    return [
        LawReport("linking associates", trials, tuple(assoc_fail), seed + 2000),
        LawReport("linking commutes", trials, tuple(comm_fail), seed + 2000),
        LawReport("overlap is order independent", trials, tuple(overlap_fail), seed + 2000),
        LawReport(
            f"steps preserved under linking ({stepped} stepped)",
            trials,
            tuple(step_fail),
            seed + 3000,
        ),
    ]


def run_property_suites(trials: int = 500, seed: int = 0) -> list[LawReport]:
    reports = run_classical_suite(trials, seed)
    reports += run_equivalence_suite(trials, seed)
    reports += check_linking_laws(random_module, max(trials * 2 // 5, 1), seed)
    return reports
