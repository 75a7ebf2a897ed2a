"""Recursive-descent parser for types, terms and formulas.

Concrete syntax::

    type    ::= atype ('->' type)?           n abbreviates n-1 -> 0
    atype   ::= NUMERAL | '(' type ')'
    term    ::= '\\' x ':' type '.' term      (compiled away by bracket abstraction)
              | product ('+' product)*
    product ::= appl ('*' appl)*
    appl    ::= head arg*
    head    ::= OP | atom                    OP is one of + * < =
    arg     ::= atom | '(' term (',' term)* ')'
    atom    ::= NUMERAL | x [':' type] | PI['['types']'] | SIGMA[...] | R0 | EvalAssoc
              | '(' OP ')' | '(' term ')'
    formula ::= ALL x:type . formula | EX x:type . formula
              | '(' ALL x:type ')' formula | ...
              | disj ('=>' formula)?
    disj    ::= conj ('\\/' conj)*     conj ::= unary ('/\\' unary)*
    unary   ::= '~' unary | quantifier | term REL term | P(term, ...) | '(' formula ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (COMBINATORS, OPERATORS, And, App, Atom, Const, Exists, ForAll, Formula,
                     Implies, Not, Num, Or, Pred, Term, Var, app, fresh_name, names_in, spine)
from .types import ZERO, Arrow, FiniteType, arg_types, pure


class ParseError(SyntaxError):
    def __init__(self, message: str, offset: int, text: str):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.text = text


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, sym, eof
    text: str
    pos: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>->|=>|/\\|\\/|[~()\[\],.:+*<=\\])
""", re.VERBOSE)

KEYWORDS = {"ALL", "EX"}


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.scopes: list[dict[str, FiniteType]] = [{}]

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "ident")

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.pos, self.text)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS or tok.text in COMBINATORS:
            self.error("expected a variable name")
        self.i += 1
        return tok

    def finish(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")

    def lookup(self, name: str) -> FiniteType | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # types

    def type_(self) -> FiniteType:
        left = self.atype()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def atype(self) -> FiniteType:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return pure(int(tok.text))
        if self.at("("):
            self.i += 1
            t = self.type_()
            self.expect(")")
            return t
        self.error("expected a type")

    # terms

    def term(self) -> Term:
        """Sums of products of applications; infix + and * are sugar for prefix use."""
        if self.at("\\"):
            return self.lambda_()
        t = self.product()
        while self.at("+"):
            op = self.tok
            self.i += 1
            t = app(Const("+", span=(op.pos, op.pos + 1)), t, self.product())
        return t

    def product(self) -> Term:
        t = self.application()
        while self.at("*"):
            op = self.tok
            self.i += 1
            t = app(Const("*", span=(op.pos, op.pos + 1)), t, self.application())
        return t

    def application(self) -> Term:
        if self.at("\\"):
            return self.lambda_()
        start = self.tok.pos
        if self.tok.kind == "sym" and self.tok.text in OPERATORS:
            head: Term = Const(self.tok.text, span=(start, start + 1))
            self.i += 1
        else:
            head = self.atom()
        while True:
            if self.at("("):
                args = self.call_args()
                head = app(head, *args)
            elif self.tok.kind in ("num", "ident") and self.tok.text not in KEYWORDS:
                head = App(head, self.atom())
            else:
                break
        if isinstance(head, App):
            head = App(head.fn, head.arg, span=(start, self.toks[self.i - 1].pos + len(self.toks[self.i - 1].text)))
        return head

    def call_args(self) -> list[Term]:
        # '(' OP ')' and '(' term ')' are single arguments; commas give several
        if self.peek().kind == "sym" and self.peek().text in OPERATORS and self.peek(2).text == ")":
            return [self.atom()]
        self.expect("(")
        args = [self.term()]
        while self.at(","):
            self.i += 1
            args.append(self.term())
        self.expect(")")
        return args

    def atom(self) -> Term:
        tok = self.tok
        span = (tok.pos, tok.pos + len(tok.text))
        if tok.kind == "num":
            self.i += 1
            return Num(int(tok.text), span=span)
        if tok.kind == "ident" and tok.text in COMBINATORS:
            self.i += 1
            params = None
            if tok.text in ("PI", "SIGMA") and self.at("["):
                self.i += 1
                params = [self.type_()]
                while self.at(","):
                    self.i += 1
                    params.append(self.type_())
                self.expect("]")
                want = 2 if tok.text == "PI" else 3
                if len(params) != want:
                    self.error(f"{tok.text} takes {want} type parameters", tok)
                params = tuple(params)
            return Const(tok.text, params, span=span)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.i += 1
            ty = None
            if self.at(":"):
                self.i += 1
                ty = self.type_()
            return Var(tok.text, ty, span=span)
        if self.at("("):
            if self.peek().kind == "sym" and self.peek().text in OPERATORS and self.peek(2).text == ")":
                op = self.peek()
                self.i += 3
                return Const(op.text, span=(op.pos, op.pos + 1))
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        self.error("expected a term")

    def lambda_(self) -> Term:
        from .bracket import lambda_abstract
        self.expect("\\")
        name = self.ident().text
        self.expect(":")
        ty = self.type_()
        self.expect(".")
        self.scopes.append({name: ty})
        try:
            body = self.term()
        finally:
            self.scopes.pop()
        return lambda_abstract(name, ty, body, self.context())

    def context(self) -> dict[str, FiniteType]:
        ctx: dict[str, FiniteType] = {}
        for scope in self.scopes:
            ctx.update(scope)
        return ctx

    # formulas

    def formula(self) -> Formula:
        if self.at("ALL") or self.at("EX"):
            return self.quantifier(parenthesized=False)
        if self.at("(") and self.peek().text in KEYWORDS:
            return self.quantifier(parenthesized=True)
        left = self.disj()
        if self.at("=>"):
            self.i += 1
            return Implies(left, self.formula())
        return left

    def quantifier(self, parenthesized: bool) -> Formula:
        if parenthesized:
            self.expect("(")
        kw = self.tok.text
        self.i += 1
        name = self.ident().text
        self.expect(":")
        ty = self.type_()
        if parenthesized:
            self.expect(")")
        else:
            self.expect(".")
        self.scopes.append({name: ty})
        try:
            body = self.formula()
        finally:
            self.scopes.pop()
        return (ForAll if kw == "ALL" else Exists)(name, ty, body)

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("\\/"):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("/\\"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return Not(self.unary())
        if self.at("ALL") or self.at("EX") or (self.at("(") and self.peek().text in KEYWORDS):
            return self.formula()
        if self.at("("):
            save = self.i
            try:
                return self.atomic()
            except ParseError:
                self.i = save
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.atomic()

    def atomic(self) -> Formula:
        start = self.tok
        lhs = self.term()
        if self.tok.kind == "sym" and self.tok.text in ("=", "<"):
            rel = self.tok.text
            self.i += 1
            rhs = self.term()
            span = (start.pos, self.toks[self.i - 1].pos + len(self.toks[self.i - 1].text))
            if rel == "=":
                return self.unfold_equality(lhs, rhs, span)
            return Atom(rel, lhs, rhs, span=span)
        head, args = spine(lhs)
        if isinstance(head, Var) and head.type is None and args:
            return Pred(head.name, tuple(args), span=lhs.span)
        self.error("expected '=' or '<' after term")

    def unfold_equality(self, lhs: Term, rhs: Term, span) -> Formula:
        """x =_t y becomes ALL z1..zk . x z1..zk = y z1..zk for t = t1->..->tk->0."""
        from .typecheck import TypeMismatch, infer
        try:
            ty = infer(lhs, self.context())
        except TypeMismatch:
            ty = ZERO
        params = arg_types(ty) if isinstance(ty, Arrow) else []
        if not params:
            return Atom("=", lhs, rhs, span=span)
        taken = names_in(Atom("=", lhs, rhs)) | set(self.context())
        zs = []
        for p in params:
            z = fresh_name("z", taken)
            taken.add(z)
            zs.append((z, p))
        body: Formula = Atom("=", app(lhs, *(Var(z) for z, _ in zs)),
                             app(rhs, *(Var(z) for z, _ in zs)), span=span)
        for z, p in reversed(zs):
            body = ForAll(z, p, body)
        return body


def parse_type(text: str) -> FiniteType:
    p = Parser(text)
    t = p.type_()
    p.finish()
    return t


def parse_term(text: str) -> Term:
    p = Parser(text)
    t = p.term()
    p.finish()
    return t


def parse_formula(text: str) -> Formula:
    p = Parser(text)
    f = p.formula()
    p.finish()
    return f
