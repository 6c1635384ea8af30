"""Runtime state: values, frames, heaps, configurations.

A configuration is a stack of frames plus a heap.  Each frame carries a
variable map and a continuation: either a plain statement list, or a marker
``x := [] ; stmts`` left in a caller while a callee frame runs above it.

Values are null, addresses, address sets, and the nat/bool extension values.
Address sets exist only so that set-quantified assertion variables can be
bound in a frame; running code never produces one.  Nats do end up in object
fields (ledgers, balances, heights), which is the reason value positions in
statements admit nat literals.

Configurations are treated as immutable: every update helper returns a new
configuration and shares the untouched parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Optional, Union

from .langoo import (
    Atom,
    ModuleDef,
    NatLit,
    NullLit,
    Stmt,
    Var,
    stmt_vars,
)

# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullValue:
    def __repr__(self) -> str:
        return "null"


NULL = NullValue()


@dataclass(frozen=True, order=True)
class Addr:
    index: int

    def __repr__(self) -> str:
        return f"@{self.index}"


@dataclass(frozen=True)
class AddrSet:
    addrs: frozenset[Addr]

    def __repr__(self) -> str:
        inner = ", ".join(repr(a) for a in sorted(self.addrs))
        return "{" + inner + "}"

    def __contains__(self, v) -> bool:
        return isinstance(v, Addr) and v in self.addrs


@dataclass(frozen=True)
class Nat:
    value: int

    def __repr__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Bool:
    value: bool

    def __repr__(self) -> str:
        return "true" if self.value else "false"


TRUE = Bool(True)
FALSE = Bool(False)

Value = Union[NullValue, Addr, AddrSet, Nat, Bool]


# ---------------------------------------------------------------------------
# Heap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObjectRecord:
    class_id: str
    fields: dict[str, Value]

    def with_field(self, name: str, value: Value) -> "ObjectRecord":
        updated = dict(self.fields)
        updated[name] = value
        return ObjectRecord(self.class_id, updated)


# ---------------------------------------------------------------------------
# Frames and configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Continuation:
    """Remaining code of a frame.  ``marker`` is the variable that will
    receive the result of a call in flight above this frame; None when no
    call is pending."""

    stmts: tuple[Stmt, ...]
    marker: Optional[str] = None

    def variables(self) -> Iterator[str]:
        """Variable occurrences in the remaining code, marker included."""
        if self.marker is not None:
            yield self.marker
        for s in self.stmts:
            yield from stmt_vars(s)


@dataclass(frozen=True)
class Frame:
    contn: Continuation
    vars: dict[str, Value]

    def lookup(self, name: str) -> Optional[Value]:
        return self.vars.get(name)

    def bind(self, name: str, value: Value) -> "Frame":
        updated = dict(self.vars)
        updated[name] = value
        return Frame(self.contn, updated)

    def with_contn(self, contn: Continuation) -> "Frame":
        return Frame(contn, self.vars)


@dataclass(frozen=True)
class Config:
    stack: tuple[Frame, ...]
    heap: dict[Addr, ObjectRecord]

    def __post_init__(self):
        if not self.stack:
            raise ValueError("a configuration needs at least one frame")

    @property
    def top(self) -> Frame:
        return self.stack[-1]

    def with_top(self, frame: Frame) -> "Config":
        return Config(self.stack[:-1] + (frame,), self.heap)

    def push(self, frame: Frame) -> "Config":
        return Config(self.stack + (frame,), self.heap)

    def pop_to(self, frame: Frame) -> "Config":
        """Drop the top frame and replace the one below with ``frame``."""
        return Config(self.stack[:-2] + (frame,), self.heap)

    def bind_top(self, name: str, value: Value) -> "Config":
        return self.with_top(self.top.bind(name, value))

    def heap_set(self, addr: Addr, record: ObjectRecord) -> "Config":
        updated = dict(self.heap)
        updated[addr] = record
        return Config(self.stack, updated)

    def fresh_addr(self) -> Addr:
        if not self.heap:
            return Addr(0)
        return Addr(max(a.index for a in self.heap) + 1)


# ---------------------------------------------------------------------------
# Interpretation of variables and field paths
# ---------------------------------------------------------------------------


def interp_var(config: Config, name: str) -> Optional[Value]:
    """Value of a variable in the top frame; None when unbound."""
    return config.top.lookup(name)


def interp_atom(config: Config, atom: Atom) -> Optional[Value]:
    """Value of a statement operand: a variable, nat literal, or null."""
    if isinstance(atom, Var):
        return interp_var(config, atom.name)
    if isinstance(atom, NatLit):
        return Nat(atom.value)
    if isinstance(atom, NullLit):
        return NULL
    return None


def interp_path(config: Config, name: str, field: str) -> Optional[Value]:
    """Value of ``x.f`` read through the heap; None when the variable is
    unbound, not an address, dangling, or the object lacks the field."""
    v = interp_var(config, name)
    if not isinstance(v, Addr):
        return None
    record = config.heap.get(v)
    if record is None:
        return None
    return record.fields.get(field)


def class_of_addr(config: Config, addr: Addr) -> Optional[str]:
    record = config.heap.get(addr)
    return record.class_id if record is not None else None


def class_of(config: Config, name: str) -> Optional[str]:
    """Class of the object a variable denotes; None when undefined."""
    v = interp_var(config, name)
    if not isinstance(v, Addr):
        return None
    return class_of_addr(config, v)


def is_internal(config: Config, internal: ModuleDef) -> bool:
    """Whether the executing object belongs to the internal module.  An
    unbound, null, or dangling ``this`` counts as external."""
    cls = class_of(config, "this")
    return cls is not None and cls in internal


def is_external(config: Config, internal: ModuleDef) -> bool:
    return not is_internal(config, internal)


# ---------------------------------------------------------------------------
# Restriction
# ---------------------------------------------------------------------------


def restrict(config: Config, addrs: Iterable[Addr]) -> Config:
    """Keep only the heap entries named in ``addrs``; frames are untouched.
    Addresses outside the heap are ignored, and surviving objects keep their
    fields bitwise, so dangling references into the removed part are legal
    and show up as failed lookups later."""
    keep = set(addrs)
    new_heap = {a: r for a, r in config.heap.items() if a in keep}
    return Config(config.stack, new_heap)


# ---------------------------------------------------------------------------
# Adaptation
# ---------------------------------------------------------------------------


def fresh_name(base: str, taken) -> str:
    """Deterministic fresh-name policy: ``base$k`` for the smallest k not in
    ``taken``.  The dollar sign keeps generated names out of the surface
    identifier syntax."""
    k = 0
    while f"{base}${k}" in taken:
        k += 1
    return f"{base}${k}"


def _rename_atom(a: Atom, ren: dict[str, str]) -> Atom:
    if isinstance(a, Var) and a.name in ren:
        return Var(ren[a.name])
    return a


def _rename_stmt(s: Stmt, ren: dict[str, str]) -> Stmt:
    from . import langoo as L

    def r(n: str) -> str:
        return ren.get(n, n)

    if isinstance(s, L.FieldWrite):
        return L.FieldWrite(r(s.obj), s.field, _rename_atom(s.value, ren))
    if isinstance(s, L.FieldRead):
        return L.FieldRead(r(s.target), r(s.obj), s.field)
    if isinstance(s, L.Call):
        return L.Call(
            r(s.target), r(s.recv), s.method, tuple(_rename_atom(a, ren) for a in s.args)
        )
    if isinstance(s, L.New):
        return L.New(r(s.target), s.class_id, tuple(_rename_atom(a, ren) for a in s.args))
    if isinstance(s, L.Return):
        return L.Return(_rename_atom(s.value, ren))
    raise TypeError(f"not a statement: {s!r}")


def rename_continuation(contn: Continuation, ren: dict[str, str]) -> Continuation:
    marker = ren.get(contn.marker, contn.marker) if contn.marker is not None else None
    return Continuation(tuple(_rename_stmt(s, ren) for s in contn.stmts), marker)


def adapt(current: Config, other: Config) -> Config:
    """View ``other`` through the variable bindings of ``current``.

    The result keeps other's heap and frame-stack tail.  Its top frame runs
    other's continuation with every one of other's top-frame variables
    consistently renamed to a fresh name, and carries the renamed bindings
    overlaid with current's top-frame bindings.  Other's bindings survive
    only under their fresh names; current's names win outright, which makes
    the construction insensitive to how other's frame happened to spell its
    variables.
    """
    beta1 = current.top.vars
    top2 = other.top
    beta2 = top2.vars
    taken = set(beta1) | set(beta2)
    renaming: dict[str, str] = {}
    for name in sorted(beta2):
        fresh = fresh_name(name, taken)
        renaming[name] = fresh
        taken.add(fresh)
    merged: dict[str, Value] = {renaming[n]: v for n, v in beta2.items()}
    merged.update(beta1)
    new_top = Frame(rename_continuation(top2.contn, renaming), merged)
    return Config(other.stack[:-1] + (new_top,), other.heap)


# ---------------------------------------------------------------------------
# Alpha-equivalence of configurations (test oracle)
# ---------------------------------------------------------------------------


def _contn_correspondence(c1: Continuation, c2: Continuation) -> Optional[dict[str, str]]:
    """Positional variable correspondence between two continuations of the
    same shape; None when shapes differ or the correspondence is inconsistent
    or not injective."""
    v1 = list(c1.variables())
    v2 = list(c2.variables())
    skel1 = _contn_skeleton(c1)
    skel2 = _contn_skeleton(c2)
    if skel1 != skel2 or len(v1) != len(v2):
        return None
    mapping: dict[str, str] = {}
    for a, b in zip(v1, v2):
        if mapping.setdefault(a, b) != b:
            return None
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def _contn_skeleton(c: Continuation):
    """Continuation with variable names blanked, for shape comparison."""
    blank = {n: "_" for n in c.variables()}
    return rename_continuation(c, blank)


def frames_alpha_equivalent(f1: Frame, f2: Frame) -> bool:
    """Frames equal up to a value-preserving bijective renaming of their
    variables that also carries one continuation to the other."""
    if len(f1.vars) != len(f2.vars):
        return False
    mapping = _contn_correspondence(f1.contn, f2.contn)
    if mapping is None:
        return False
    rest1 = dict(f1.vars)
    rest2 = dict(f2.vars)
    for a, b in mapping.items():
        if a not in rest1 or b not in rest2:
            return False
        if rest1.pop(a) != rest2.pop(b):
            return False
    # Remaining variables never occur in code, so only the multiset of their
    # values matters.
    tally: dict[str, int] = {}
    for v in rest1.values():
        tally[repr(v)] = tally.get(repr(v), 0) + 1
    for v in rest2.values():
        key = repr(v)
        if tally.get(key, 0) == 0:
            return False
        tally[key] -= 1
    return all(n == 0 for n in tally.values())


def configs_alpha_equivalent(c1: Config, c2: Config) -> bool:
    """Same heap and stack, with top frames compared up to renaming."""
    if c1.heap != c2.heap:
        return False
    if len(c1.stack) != len(c2.stack):
        return False
    if c1.stack[:-1] != c2.stack[:-1]:
        return False
    return frames_alpha_equivalent(c1.top, c2.top)


# ---------------------------------------------------------------------------
# Debug validation and JSON dumps
# ---------------------------------------------------------------------------


def unreachable_refs(config: Config) -> list[str]:
    """Dangling-address and set-in-heap findings, as human-readable strings.
    Expected to be empty for configurations produced by running code; not
    for restricted ones."""
    problems = []
    for addr, record in config.heap.items():
        for fname, v in record.fields.items():
            if isinstance(v, Addr) and v not in config.heap:
                problems.append(f"{addr!r}.{fname} dangles: {v!r}")
            if isinstance(v, AddrSet):
                problems.append(f"{addr!r}.{fname} holds an address set")
    for depth, frame in enumerate(config.stack):
        for name, v in frame.vars.items():
            if isinstance(v, Addr) and v not in config.heap:
                problems.append(f"frame {depth} variable {name} dangles: {v!r}")
    return problems


def value_to_json(v: Value):
    if isinstance(v, NullValue):
        return None
    if isinstance(v, Addr):
        return {"addr": v.index}
    if isinstance(v, AddrSet):
        return {"set": [a.index for a in sorted(v.addrs)]}
    if isinstance(v, Nat):
        return {"nat": v.value}
    if isinstance(v, Bool):
        return v.value
    raise TypeError(f"not a value: {v!r}")


def config_to_json(config: Config) -> dict:
    """Deterministic JSON-ready dump of a configuration, for traces and
    debugging.  Continuations are rendered back to source text."""
    from .printer import print_stmts

    frames = []
    for frame in config.stack:
        contn: dict = {"stmts": print_stmts(frame.contn.stmts)}
        if frame.contn.marker is not None:
            contn["marker"] = frame.contn.marker
        frames.append(
            {
                "vars": {n: value_to_json(v) for n, v in sorted(frame.vars.items())},
                "contn": contn,
            }
        )
    heap = {
        str(addr.index): {
            "class": rec.class_id,
            "fields": {f: value_to_json(v) for f, v in sorted(rec.fields.items())},
        }
        for addr, rec in sorted(config.heap.items())
    }
    return {"stack": frames, "heap": heap}
