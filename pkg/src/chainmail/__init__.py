"""chainmail: check holistic assertions about object-capability programs
along recorded two-module executions."""

from .langoo import (
    ClassDescr,
    GhostDecl,
    LangError,
    MethodDecl,
    ModuleDef,
    OverlapError,
    WellFormednessError,
    link,
)
from .runtime import (
    Addr,
    AddrSet,
    Bool,
    Config,
    Continuation,
    Frame,
    NULL,
    Nat,
    ObjectRecord,
    adapt,
    restrict,
)
from .interpreter import Bounds, Trace, external_step, initial, record_trace, run, step
from .ghosts import Defined, Undefined, eval_expr
from .assertions import (
    Assertion,
    BoundsExceeded,
    EvalContext,
    NamedAssertion,
    Spec,
    desugar_changes,
    sat,
)
from .parser import ParseError, parse_assertion, parse_module, parse_spec, parse_stmts
from .printer import print_assertion, print_expr, print_module, print_spec, print_stmt
from .checker import Verdict, Witness, check_run

__version__ = "0.1.0"

__all__ = [
    "Addr",
    "AddrSet",
    "Assertion",
    "Bool",
    "Bounds",
    "BoundsExceeded",
    "ClassDescr",
    "Config",
    "Continuation",
    "Defined",
    "EvalContext",
    "Frame",
    "GhostDecl",
    "LangError",
    "MethodDecl",
    "ModuleDef",
    "NULL",
    "NamedAssertion",
    "Nat",
    "ObjectRecord",
    "OverlapError",
    "ParseError",
    "Spec",
    "Trace",
    "Undefined",
    "Verdict",
    "WellFormednessError",
    "Witness",
    "adapt",
    "check_run",
    "desugar_changes",
    "eval_expr",
    "external_step",
    "initial",
    "link",
    "parse_assertion",
    "parse_module",
    "parse_spec",
    "parse_stmts",
    "print_assertion",
    "print_expr",
    "print_module",
    "print_spec",
    "print_stmt",
    "record_trace",
    "restrict",
    "run",
    "sat",
    "step",
    "__version__",
]
