"""Syntax for the object language.

A module is a finite map from class names to class descriptions.  A class
declares fields, methods, and ghost fields.  Method bodies are flat statement
lists in one of five forms (field write, field read, method call, object
creation, return); there are no statement-level conditionals or loops.  Ghost
fields are side-effect-free expressions used only by assertions and other
ghosts, never by running code.

Expressions carry a small arithmetic extension (nat literals, +, >=) so that
ghost code can fold numeric state; the executable fragment is untouched by it
except that value positions in statements (call/new arguments, field-write
sources, return) may be nat literals or null as well as variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

RESERVED_CLASS = "Object"


@dataclass(frozen=True)
class SourceSpan:
    """Half-open region of source text, for diagnostics."""

    file: str
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class LangError(Exception):
    """Base class for errors raised while building or linking modules."""

    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.span = span
        if span is not None:
            message = f"{span}: {message}"
        super().__init__(message)


class WellFormednessError(LangError):
    pass


class OverlapError(LangError):
    """Two modules declare the same class, so their link is undefined."""

    def __init__(self, class_ids):
        self.class_ids = tuple(sorted(class_ids))
        super().__init__("modules overlap on classes: " + ", ".join(self.class_ids))


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrueLit:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FalseLit:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NullLit:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NatLit:
    value: int
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Eq:
    lhs: "Expr"
    rhs: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FieldSel:
    """``e.f``: a heap field read, falling back to a zero-argument ghost."""

    target: "Expr"
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GhostCall:
    """``e.f(e1, .., en)``: explicit ghost-field application."""

    target: "Expr"
    name: str
    args: tuple["Expr", ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Plus:
    lhs: "Expr"
    rhs: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Geq:
    lhs: "Expr"
    rhs: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


Expr = Union[
    TrueLit, FalseLit, NullLit, NatLit, Var, Eq, If, FieldSel, GhostCall, Plus, Geq
]

#: expression forms allowed in value positions of statements
Atom = Union[Var, NatLit, NullLit]


def is_atom(e: Expr) -> bool:
    return isinstance(e, (Var, NatLit, NullLit))


def _check_atom(e: Expr, where: str, span) -> None:
    if not is_atom(e):
        raise WellFormednessError(
            f"{where} must be a variable, nat literal, or null", span
        )


def expr_vars(e: Expr) -> Iterator[str]:
    """All variable names occurring in ``e``, in source order."""
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Eq):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)
    elif isinstance(e, If):
        yield from expr_vars(e.cond)
        yield from expr_vars(e.then)
        yield from expr_vars(e.orelse)
    elif isinstance(e, FieldSel):
        yield from expr_vars(e.target)
    elif isinstance(e, GhostCall):
        yield from expr_vars(e.target)
        for a in e.args:
            yield from expr_vars(a)
    elif isinstance(e, (Plus, Geq)):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldWrite:
    """``x.f := y``"""

    obj: str
    field: str
    value: Atom
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_atom(self.value, "field-write source", self.span)


@dataclass(frozen=True)
class FieldRead:
    """``x := y.f``"""

    target: str
    obj: str
    field: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    """``x := y.m(args)``"""

    target: str
    recv: str
    method: str
    args: tuple[Atom, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for a in self.args:
            _check_atom(a, "call argument", self.span)


@dataclass(frozen=True)
class New:
    """``x := new C(args)``"""

    target: str
    class_id: str
    args: tuple[Atom, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for a in self.args:
            _check_atom(a, "constructor argument", self.span)


@dataclass(frozen=True)
class Return:
    """``return x``"""

    value: Atom
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_atom(self.value, "return value", self.span)


Stmt = Union[FieldWrite, FieldRead, Call, New, Return]


def stmt_vars(s: Stmt) -> Iterator[str]:
    """All variable names occurring in ``s``, targets included."""
    if isinstance(s, FieldWrite):
        yield s.obj
        yield from expr_vars(s.value)
    elif isinstance(s, FieldRead):
        yield s.target
        yield s.obj
    elif isinstance(s, Call):
        yield s.target
        yield s.recv
        for a in s.args:
            yield from expr_vars(a)
    elif isinstance(s, New):
        yield s.target
        for a in s.args:
            yield from expr_vars(a)
    elif isinstance(s, Return):
        yield from expr_vars(s.value)


# ---------------------------------------------------------------------------
# Declarations and modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_params(self.params, f"method {self.name}", self.span)


@dataclass(frozen=True)
class GhostDecl:
    name: str
    params: tuple[str, ...]
    body: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_params(self.params, f"ghost {self.name}", self.span)


def _check_params(params, who, span):
    if "this" in params:
        raise WellFormednessError(f"{who}: 'this' cannot be a parameter", span)
    if len(set(params)) != len(params):
        raise WellFormednessError(f"{who}: duplicate parameter names", span)


@dataclass(frozen=True)
class ClassDescr:
    """One class: field names, methods, and ghost fields.

    Well-formedness is checked eagerly here, so that lookups never have to:
    field, method, and ghost names must each be duplicate-free, and the field
    and ghost name sets must be disjoint (a name is resolved field-first, so
    a clash would shadow the ghost silently).
    """

    name: str
    fields: tuple[str, ...]
    methods: tuple[MethodDecl, ...]
    ghosts: tuple[GhostDecl, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.name == RESERVED_CLASS:
            raise WellFormednessError(
                f"class name {RESERVED_CLASS!r} is reserved for the initial object",
                self.span,
            )
        if len(set(self.fields)) != len(self.fields):
            raise WellFormednessError(f"class {self.name}: duplicate field", self.span)
        mnames = [m.name for m in self.methods]
        if len(set(mnames)) != len(mnames):
            raise WellFormednessError(f"class {self.name}: duplicate method", self.span)
        gnames = [g.name for g in self.ghosts]
        if len(set(gnames)) != len(gnames):
            raise WellFormednessError(f"class {self.name}: duplicate ghost", self.span)
        clash = set(self.fields) & set(gnames)
        if clash:
            raise WellFormednessError(
                f"class {self.name}: ghost and field share a name: "
                + ", ".join(sorted(clash)),
                self.span,
            )

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    def ghost(self, name: str) -> Optional[GhostDecl]:
        for g in self.ghosts:
            if g.name == name:
                return g
        return None


@dataclass(frozen=True)
class ModuleDef:
    """A finite map from class name to class description."""

    classes: tuple[ClassDescr, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            dups = sorted({n for n in names if names.count(n) > 1})
            raise WellFormednessError("duplicate class declarations: " + ", ".join(dups))

    def class_ids(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    def lookup(self, class_id: str) -> Optional[ClassDescr]:
        for c in self.classes:
            if c.name == class_id:
                return c
        return None

    def __contains__(self, class_id: str) -> bool:
        return self.lookup(class_id) is not None


EMPTY_MODULE = ModuleDef(classes=())


def lookup_method(module: ModuleDef, class_id: str, name: str) -> Optional[MethodDecl]:
    c = module.lookup(class_id)
    return c.method(name) if c is not None else None


def lookup_ghost(module: ModuleDef, class_id: str, name: str) -> Optional[GhostDecl]:
    c = module.lookup(class_id)
    return c.ghost(name) if c is not None else None


def link(m1: ModuleDef, m2: ModuleDef) -> ModuleDef:
    """Union of two modules; undefined (raises OverlapError) when their
    class-name domains intersect.  Classes of ``m1`` come first so that
    linking in either order yields equal maps up to ordering; equality of
    modules here is order-insensitive (see ``modules_equal``)."""
    overlap = set(m1.class_ids()) & set(m2.class_ids())
    if overlap:
        raise OverlapError(overlap)
    return ModuleDef(classes=m1.classes + m2.classes)


def modules_equal(m1: ModuleDef, m2: ModuleDef) -> bool:
    """Map equality: same class-name domain, same description per name."""
    if set(m1.class_ids()) != set(m2.class_ids()):
        return False
    return all(m1.lookup(n) == m2.lookup(n) for n in m1.class_ids())
