"""Hand-rolled lexer and recursive-descent parser for the two surface
languages: ``.loo`` module files (classes with fields, methods, ghosts) and
``.cmail`` specification files (named assertions).

Both share one token alphabet.  ``//`` starts a line comment.  Assertions
may use ``( )`` and ``[ ]`` interchangeably for grouping.  Quantifier
binders are checked for shadowing and renamed apart while parsing, so the
satisfaction machinery never sees two nested binders with one name.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import assertions as A
from . import langoo as L
from .langoo import LangError, SourceSpan

KEYWORDS = {
    "class", "field", "method", "ghost", "new", "return",
    "true", "false", "null", "if", "then", "else",
    "forall", "exists", "in", "access", "calls", "external", "internal",
    "next", "will", "prev", "was", "changes", "assert", "SET",
}

# Words with meaning only in assertion position; they still name fields,
# methods, classes, and statement variables.  Expression variables cannot
# use them (an assertion could not mention such a variable anyway).
SOFT_KEYWORDS = frozenset({
    "forall", "exists", "in", "access", "calls", "external", "internal",
    "next", "will", "prev", "was", "changes", "assert", "SET",
})

_OPS = [
    "==>", ":=", ">=", "&&", "||",
    "=", "!", "+", ".", ",", ";", ":", "(", ")", "{", "}", "[", "]", "*",
]


class ParseError(LangError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | NAT | KW | OP | WILD | EOF
    text: str
    line: int
    column: int


def tokenize(text: str, filename: str = "<string>") -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("NAT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "_":
                kind = "WILD"
            elif word in KEYWORDS:
                kind = "KW"
            else:
                kind = "IDENT"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for op in _OPS:
            if text.startswith(op, i):
                tokens.append(Token("OP", op, line, col))
                col += len(op)
                i += len(op)
                break
        else:
            raise ParseError(
                f"unexpected character {c!r}", SourceSpan(filename, line, col, line, col + 1)
            )
    tokens.append(Token("EOF", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str, filename: str = "<string>"):
        self.filename = filename
        self.tokens = tokenize(text, filename)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("OP", "KW")

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind == "IDENT" or (tok.kind == "KW" and tok.text in SOFT_KEYWORDS):
            return self.advance().text
        self.fail(f"expected {what}")

    def fail(self, message: str):
        tok = self.peek()
        got = tok.text if tok.kind != "EOF" else "end of input"
        raise ParseError(
            f"{message}, got {got!r}", self.span_at(tok)
        )

    def span_at(self, tok: Token) -> SourceSpan:
        end = tok.column + max(len(tok.text), 1)
        return SourceSpan(self.filename, tok.line, tok.column, tok.line, end)

    def span_from(self, start: Token) -> SourceSpan:
        last = self.tokens[max(self.pos - 1, 0)]
        return SourceSpan(
            self.filename,
            start.line,
            start.column,
            last.line,
            last.column + len(last.text),
        )

    # -- modules -----------------------------------------------------------

    def parse_module(self) -> L.ModuleDef:
        start = self.peek()
        classes = []
        while not self.peek().kind == "EOF":
            classes.append(self.class_decl())
        return L.ModuleDef(tuple(classes), span=self.span_from(start))

    def class_decl(self) -> L.ClassDescr:
        start = self.peek()
        self.expect("class")
        name = self.ident("class name")
        self.expect("{")
        fields: list[str] = []
        methods: list[L.MethodDecl] = []
        ghosts: list[L.GhostDecl] = []
        while not self.accept("}"):
            if self.accept("field"):
                fields.append(self.ident("field name"))
            elif self.at("method"):
                methods.append(self.method_decl())
            elif self.at("ghost"):
                ghosts.append(self.ghost_decl())
            else:
                self.fail("expected 'field', 'method', 'ghost', or '}'")
        return L.ClassDescr(
            name, tuple(fields), tuple(methods), tuple(ghosts), span=self.span_from(start)
        )

    def method_decl(self) -> L.MethodDecl:
        start = self.peek()
        self.expect("method")
        name = self.ident("method name")
        params = self.param_list()
        self.expect("{")
        body = []
        while not self.accept("}"):
            body.append(self.stmt())
        return L.MethodDecl(name, params, tuple(body), span=self.span_from(start))

    def ghost_decl(self) -> L.GhostDecl:
        start = self.peek()
        self.expect("ghost")
        name = self.ident("ghost name")
        params = self.param_list()
        # Both "ghost g(x) { e }" and "ghost g(x) = e" are accepted; the
        # printer emits the brace form.
        if self.accept("="):
            body = self.expr()
        else:
            self.expect("{")
            body = self.expr()
            self.expect("}")
        return L.GhostDecl(name, params, body, span=self.span_from(start))

    def param_list(self) -> tuple[str, ...]:
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.ident("parameter"))
            while self.accept(","):
                params.append(self.ident("parameter"))
        self.expect(")")
        return tuple(params)

    # -- statements --------------------------------------------------------

    def parse_stmts(self) -> tuple[L.Stmt, ...]:
        stmts = []
        while self.peek().kind != "EOF":
            stmts.append(self.stmt())
        return tuple(stmts)

    def stmt(self) -> L.Stmt:
        start = self.peek()
        if self.accept("return"):
            value = self.atom()
            self.expect(";")
            return L.Return(value, span=self.span_from(start))
        name = self.ident("statement")
        if self.accept("."):
            field = self.ident("field name")
            self.expect(":=")
            value = self.atom()
            self.expect(";")
            return L.FieldWrite(name, field, value, span=self.span_from(start))
        self.expect(":=")
        if self.accept("new"):
            class_id = self.ident("class name")
            args = self.atom_list()
            self.expect(";")
            return L.New(name, class_id, args, span=self.span_from(start))
        obj = self.ident("object variable")
        self.expect(".")
        member = self.ident("member name")
        if self.at("("):
            args = self.atom_list()
            self.expect(";")
            return L.Call(name, obj, member, args, span=self.span_from(start))
        self.expect(";")
        return L.FieldRead(name, obj, member, span=self.span_from(start))

    def atom(self) -> L.Atom:
        tok = self.peek()
        if tok.kind == "NAT":
            self.advance()
            return L.NatLit(int(tok.text), span=self.span_at(tok))
        if self.accept("null"):
            return L.NullLit(span=self.span_at(tok))
        if tok.kind == "IDENT" or (tok.kind == "KW" and tok.text in SOFT_KEYWORDS):
            # program variables may reuse assertion-language words
            self.advance()
            return L.Var(tok.text, span=self.span_at(tok))
        self.fail("expected a variable, nat literal, or null")

    def atom_list(self) -> tuple[L.Atom, ...]:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.atom())
            while self.accept(","):
                args.append(self.atom())
        self.expect(")")
        return tuple(args)

    # -- expressions -------------------------------------------------------

    def expr(self) -> L.Expr:
        if self.at("if"):
            return self.if_expr()
        left = self.cmp_expr()
        if self.accept("="):
            right = self.cmp_expr()
            return L.Eq(left, right)
        return left

    def if_expr(self) -> L.Expr:
        start = self.peek()
        self.expect("if")
        cond = self.cmp_or_eq()
        self.expect("then")
        then = self.cmp_or_eq()
        self.expect("else")
        orelse = self.cmp_or_eq()
        return L.If(cond, then, orelse, span=self.span_from(start))

    def cmp_or_eq(self) -> L.Expr:
        left = self.cmp_expr()
        if self.accept("="):
            return L.Eq(left, self.cmp_expr())
        return left

    def cmp_expr(self) -> L.Expr:
        left = self.sum_expr()
        if self.accept(">="):
            return L.Geq(left, self.sum_expr())
        return left

    def sum_expr(self) -> L.Expr:
        left = self.postfix_expr()
        while self.accept("+"):
            left = L.Plus(left, self.postfix_expr())
        return left

    def postfix_expr(self) -> L.Expr:
        e = self.primary_expr()
        while self.accept("."):
            name = self.ident("field or ghost name")
            if self.at("("):
                self.expect("(")
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                e = L.GhostCall(e, name, tuple(args))
            else:
                e = L.FieldSel(e, name)
        return e

    def primary_expr(self) -> L.Expr:
        tok = self.peek()
        if self.accept("true"):
            return L.TrueLit(span=self.span_at(tok))
        if self.accept("false"):
            return L.FalseLit(span=self.span_at(tok))
        if self.accept("null"):
            return L.NullLit(span=self.span_at(tok))
        if tok.kind == "NAT":
            self.advance()
            return L.NatLit(int(tok.text), span=self.span_at(tok))
        if tok.kind == "IDENT":
            self.advance()
            return L.Var(tok.text, span=self.span_at(tok))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("if"):
            return self.if_expr()
        self.fail("expected an expression")

    # -- assertions --------------------------------------------------------

    def parse_assertion(self) -> A.Assertion:
        a = self.assertion()
        return normalize_binders(a)

    def assertion(self) -> A.Assertion:
        start = self.peek()
        if self.accept("forall"):
            return self.binder(A.ForallObj, A.ForallSet, start)
        if self.accept("exists"):
            return self.binder(A.ExistsObj, A.ExistsSet, start)
        if self.at("in"):
            # space form: "in S: A"
            self.advance()
            set_var = self.ident("set variable")
            self.expect(":")
            body = self.assertion()
            return A.Space(set_var, body, span=self.span_from(start))
        return self.implication()

    def binder(self, obj_cls, set_cls, start) -> A.Assertion:
        var = self.ident("bound variable")
        cls = obj_cls
        if self.accept(":"):
            self.expect("SET")
            cls = set_cls
        self.expect(".")
        body = self.assertion()
        return cls(var, body, span=self.span_from(start))

    def implication(self) -> A.Assertion:
        left = self.disjunction()
        if self.accept("==>"):
            # The right side may open a fresh quantifier or space prefix;
            # implication itself stays right associative through assertion().
            return A.Implies(left, self.assertion())
        return left

    def disjunction(self) -> A.Assertion:
        left = self.conjunction()
        while self.accept("||"):
            left = A.Or(left, self.conjunction())
        return left

    def conjunction(self) -> A.Assertion:
        left = self.unary_assertion()
        while self.accept("&&"):
            left = A.And(left, self.unary_assertion())
        return left

    def unary_assertion(self) -> A.Assertion:
        start = self.peek()
        if self.accept("!"):
            return A.Not(self.unary_assertion(), span=self.span_from(start))
        for word, cls in (("next", A.Next), ("will", A.Will), ("prev", A.Prev), ("was", A.Was)):
            if self.accept(word):
                return cls(self.unary_assertion(), span=self.span_from(start))
        return self.assertion_atom()

    def assertion_atom(self) -> A.Assertion:
        start = self.peek()
        if self.accept("access"):
            if self.at("*"):
                self.fail(
                    "transitive access (access*) is not part of the assertion "
                    "language; see docs/grammar.md"
                )
            self.expect("(")
            of = self.expr()
            self.expect(",")
            to = self.expr()
            self.expect(")")
            return A.Access(of, to, span=self.span_from(start))
        if self.accept("calls"):
            self.expect("(")
            caller = self.expr()
            self.expect(",")
            method = self.ident("method name")
            self.expect(",")
            recv = self.expr()
            self.expect(",")
            self.expect("[")
            args: list[A.CallArg] = []
            if not self.at("]"):
                args.append(self.call_arg())
                while self.accept(","):
                    args.append(self.call_arg())
            self.expect("]")
            self.expect(")")
            return A.Calls(caller, method, recv, tuple(args), span=self.span_from(start))
        if self.accept("external"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.External(e, span=self.span_from(start))
        if self.accept("internal"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.Internal(e, span=self.span_from(start))
        if self.accept("changes"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.Changes(e, span=self.span_from(start))
        if self.at("(") or self.at("["):
            saved = self.pos
            try:
                return self.expr_atom()
            except ParseError:
                self.pos = saved
            close = ")" if self.at("(") else "]"
            self.advance()
            inner = self.assertion()
            self.expect(close)
            return inner
        return self.expr_atom()

    def call_arg(self) -> A.CallArg:
        if self.peek().kind == "WILD":
            self.advance()
            return A.WILDCARD
        return self.expr()

    def expr_atom(self) -> A.Assertion:
        start = self.peek()
        left = self.cmp_expr()
        if self.accept("="):
            right = self.cmp_expr()
            return A.Eq(left, right, span=self.span_from(start))
        if self.accept(":"):
            class_id = self.ident("class name")
            return A.HasClass(left, class_id, span=self.span_from(start))
        if self.accept("in"):
            set_var = self.ident("set variable")
            return A.In(left, set_var, span=self.span_from(start))
        if isinstance(left, L.Eq):
            return A.Eq(left.lhs, left.rhs, span=self.span_from(start))
        return A.ExprHolds(left, span=self.span_from(start))

    # -- specification files ----------------------------------------------

    def parse_spec(self, name: str) -> A.Spec:
        entries = []
        seen = set()
        while self.peek().kind != "EOF":
            start = self.peek()
            self.expect("assert")
            aname = self.ident("assertion name")
            if aname in seen:
                raise ParseError(f"duplicate assertion name {aname!r}", self.span_at(start))
            seen.add(aname)
            self.expect(":")
            body = self.parse_assertion()
            self.expect(";")
            entries.append(A.NamedAssertion(aname, body, span=self.span_from(start)))
        return A.Spec(name, tuple(entries))


# ---------------------------------------------------------------------------
# Binder hygiene
# ---------------------------------------------------------------------------


def normalize_binders(a: A.Assertion) -> A.Assertion:
    """Rename nested binders that shadow an enclosing one, choosing the
    smallest numeric suffix not used anywhere in the assertion.  Idempotent,
    and renamed forms re-parse to themselves."""
    used = set(A.assertion_vars(a))

    def fresh(base: str) -> str:
        k = 2
        while f"{base}{k}" in used:
            k += 1
        name = f"{base}{k}"
        used.add(name)
        return name

    def walk(node: A.Assertion, active: frozenset[str]) -> A.Assertion:
        if isinstance(node, (A.ForallObj, A.ExistsObj, A.ForallSet, A.ExistsSet)):
            var = node.var
            body = node.body
            if var in active:
                renamed = fresh(var)
                body = A.subst(body, var, renamed)
                var = renamed
            return type(node)(var, walk(body, active | {var}), span=node.span)
        if isinstance(node, A.Not):
            return A.Not(walk(node.body, active), span=node.span)
        if isinstance(node, (A.And, A.Or, A.Implies)):
            return type(node)(
                walk(node.lhs, active), walk(node.rhs, active), span=node.span
            )
        if isinstance(node, A.Space):
            return A.Space(node.set_var, walk(node.body, active), span=node.span)
        if isinstance(node, (A.Next, A.Will, A.Prev, A.Was)):
            return type(node)(walk(node.body, active), span=node.span)
        if isinstance(node, A.BindValue):
            var = node.var
            body = node.body
            if var in active:
                renamed = fresh(var)
                body = A.subst(body, var, renamed)
                var = renamed
            return A.BindValue(var, node.expr, walk(body, active | {var}), span=node.span)
        return node

    return walk(a, frozenset())


# ---------------------------------------------------------------------------
# Convenience entry points
# ---------------------------------------------------------------------------


def parse_module(text: str, filename: str = "<string>") -> L.ModuleDef:
    return Parser(text, filename).parse_module()


def parse_stmts(text: str, filename: str = "<driver>") -> tuple[L.Stmt, ...]:
    return Parser(text, filename).parse_stmts()


def parse_expr(text: str, filename: str = "<string>") -> L.Expr:
    p = Parser(text, filename)
    e = p.expr()
    if p.peek().kind != "EOF":
        p.fail("trailing input after expression")
    return e


def parse_assertion(text: str, filename: str = "<string>") -> A.Assertion:
    p = Parser(text, filename)
    a = p.parse_assertion()
    if p.peek().kind != "EOF":
        p.fail("trailing input after assertion")
    return a


def parse_spec(text: str, name: str = "spec", filename: str = "<string>") -> A.Spec:
    return Parser(text, filename).parse_spec(name)
