"""Abstract syntax of terms and formulas, with a printer the parser reads back."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .types import FiniteType

Span = tuple[int, int] | None

OPERATORS = ("+", "*", "<", "=")
COMBINATORS = ("PI", "SIGMA", "R0", "EvalAssoc")


@dataclass(frozen=True)
class Var:
    name: str
    type: FiniteType | None = None  # annotation as written, if any
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: int
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    name: str  # one of OPERATORS or COMBINATORS
    params: tuple[FiniteType, ...] | None = None  # PI[s,t] / SIGMA[r,s,t]
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term
    span: Span = field(default=None, compare=False, repr=False)


Term = Var | Num | Const | App


@dataclass(frozen=True)
class Atom:
    rel: str  # "=" or "<", between terms of type 0
    lhs: Term
    rhs: Term
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pred:
    """Schematic relation letter applied to terms, e.g. A(x, y)."""
    name: str
    args: tuple[Term, ...]
    span: Span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll:
    var: str
    type: FiniteType
    body: Formula


@dataclass(frozen=True)
class Exists:
    var: str
    type: FiniteType
    body: Formula


Formula = Atom | Pred | Not | And | Or | Implies | ForAll | Exists
Quantifier = (ForAll, Exists)


def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        yield from subterms(t.fn)
        yield from subterms(t.arg)


def free_vars(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def substitute(t: Term, name: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, App):
        return App(substitute(t.fn, name, value), substitute(t.arg, name, value))
    return t


def formula_terms(phi: Formula) -> Iterator[Term]:
    if isinstance(phi, Atom):
        yield phi.lhs
        yield phi.rhs
    elif isinstance(phi, Pred):
        yield from phi.args
    elif isinstance(phi, Not):
        yield from formula_terms(phi.body)
    elif isinstance(phi, (And, Or, Implies)):
        yield from formula_terms(phi.left)
        yield from formula_terms(phi.right)
    else:
        yield from formula_terms(phi.body)


def names_in(phi: Formula) -> set[str]:
    names = set()
    for t in formula_terms(phi):
        names |= free_vars(t)
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Quantifier):
            names.add(f.var)
            stack.append(f.body)
        elif isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, (And, Or, Implies)):
            stack += [f.left, f.right]
        elif isinstance(f, Pred):
            names.add(f.name)
    return names


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Atom, Pred)):
        return True
    if isinstance(phi, Not):
        return is_quantifier_free(phi.body)
    if isinstance(phi, (And, Or, Implies)):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return False


def map_terms(phi: Formula, fn) -> Formula:
    """Rebuild phi with every maximal term replaced by fn(term)."""
    if isinstance(phi, Atom):
        return Atom(phi.rel, fn(phi.lhs), fn(phi.rhs))
    if isinstance(phi, Pred):
        return Pred(phi.name, tuple(fn(a) for a in phi.args))
    if isinstance(phi, Not):
        return Not(map_terms(phi.body, fn))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(map_terms(phi.left, fn), map_terms(phi.right, fn))
    return type(phi)(phi.var, phi.type, map_terms(phi.body, fn))


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


# printing

def show_term(t: Term) -> str:
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return t.name if t.type is None else f"{t.name}:{t.type}"
    if isinstance(t, Const):
        if t.params is None:
            return t.name
        return t.name + "[" + ",".join(str(p) for p in t.params) + "]"
    head, args = spine(t)
    if isinstance(head, Var) or (isinstance(head, Const) and head.name == "EvalAssoc"):
        return _show_arg(head) + "(" + ", ".join(show_term(a) for a in args) + ")"
    return " ".join([show_term(head)] + [_show_arg(a) for a in args])


def _show_arg(t: Term) -> str:
    if isinstance(t, Const) and t.name in OPERATORS:
        return f"({t.name})"
    if isinstance(t, Var) and t.type is not None:
        return f"({show_term(t)})"
    if isinstance(t, App):
        head, _ = spine(t)
        if isinstance(head, Var) or (isinstance(head, Const) and head.name == "EvalAssoc"):
            return show_term(t)
        return f"({show_term(t)})"
    return show_term(t)


# precedence: quantifiers 0, => 1, \/ 2, /\ 3, ~ 4, atoms 5
def show_formula(phi: Formula, style: str = "dot") -> str:
    """Pretty-print; style "dot" gives ALL x:T . body, "paren" gives (ALL x:T) body."""
    if style not in ("dot", "paren"):
        raise ValueError(f"unknown style {style!r}")
    return _show(phi, 0, style)


def _show(phi: Formula, ctx: int, style: str) -> str:
    if isinstance(phi, Atom):
        return f"{show_term(phi.lhs)} {phi.rel} {show_term(phi.rhs)}"
    if isinstance(phi, Pred):
        return phi.name + "(" + ", ".join(show_term(a) for a in phi.args) + ")"
    if isinstance(phi, Not):
        return "~" + _show(phi.body, 4, style)
    if isinstance(phi, Quantifier):
        kw = "ALL" if isinstance(phi, ForAll) else "EX"
        body = _show(phi.body, 0, style)
        if style == "dot":
            s = f"{kw} {phi.var}:{phi.type} . {body}"
        else:
            sep = "" if isinstance(phi.body, Quantifier) else " "
            s = f"({kw} {phi.var}:{phi.type}){sep}{body}"
        return s if ctx == 0 else f"({s})"
    if isinstance(phi, Implies):
        s = f"{_show(phi.left, 2, style)} => {_show(phi.right, 1, style)}"
        prec = 1
    elif isinstance(phi, Or):
        s = f"{_show(phi.left, 2, style)} \\/ {_show(phi.right, 3, style)}"
        prec = 2
    else:
        s = f"{_show(phi.left, 3, style)} /\\ {_show(phi.right, 4, style)}"
        prec = 3
    return s if ctx <= prec else f"({s})"
