"""Source-to-source passes: the ECF translation and QF-AC skolemization."""

from __future__ import annotations

from .syntax import (And, App, Atom, Const, Exists, ForAll, Formula, Implies, Not, Or, Pred,
                     Quantifier, Term, Var, fresh_name, is_quantifier_free, map_terms, names_in,
                     substitute)
from .types import Arrow, degree, pure


class ECFUnsupported(ValueError):
    pass


class DegreeTooHigh(ECFUnsupported):
    pass


class ShapeMismatch(ValueError):
    pass


TYPE2 = pure(2)


def ecf_translate(phi: Formula) -> Formula:
    """Replace type-2 quantifiers by quantifiers over associates.

    ``ALL Y:2 . ...Y(f)...`` becomes ``ALL a:1 . ...EvalAssoc(a, f)...``;
    quantifiers of degree at most 1 are left alone.
    """
    taken = set(names_in(phi))
    return _ecf(phi, {}, taken)


def _ecf(phi: Formula, assoc: dict[str, str], taken: set[str]) -> Formula:
    if isinstance(phi, (Atom, Pred)):
        return map_terms(phi, lambda t: _ecf_term(t, assoc))
    if isinstance(phi, Not):
        return Not(_ecf(phi.body, assoc, taken))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_ecf(phi.left, assoc, taken), _ecf(phi.right, assoc, taken))
    d = degree(phi.type)
    if d >= 3:
        raise DegreeTooHigh(f"{phi.var}:{phi.type} has degree {d}; only degree <= 2 is translated")
    inner = {k: v for k, v in assoc.items() if k != phi.var}
    if d <= 1:
        return type(phi)(phi.var, phi.type, _ecf(phi.body, inner, taken))
    if phi.type != TYPE2:
        raise ECFUnsupported(f"{phi.var}:{phi.type} is degree 2 but not type 2 = 1->0")
    a = fresh_name("a", taken)
    taken.add(a)
    inner[phi.var] = a
    return type(phi)(a, pure(1), _ecf(phi.body, inner, taken))


def _ecf_term(t: Term, assoc: dict[str, str]) -> Term:
    if isinstance(t, Var):
        if t.name in assoc:
            raise ECFUnsupported(f"type-2 variable {t.name} occurs other than applied to an argument")
        if t.type is not None and degree(t.type) >= 2:
            raise DegreeTooHigh(f"free variable {t.name}:{t.type} has degree {degree(t.type)}")
        return t
    if isinstance(t, App):
        if isinstance(t.fn, Var) and t.fn.name in assoc:
            return App(App(Const("EvalAssoc"), Var(assoc[t.fn.name])), _ecf_term(t.arg, assoc))
        return App(_ecf_term(t.fn, assoc), _ecf_term(t.arg, assoc))
    return t


def max_quantifier_degree(phi: Formula) -> int:
    """Largest degree of a quantified or annotated variable in phi (0 if none)."""
    from .syntax import formula_terms, subterms
    best = 0
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Quantifier):
            best = max(best, degree(f.type))
            stack.append(f.body)
        elif isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, (And, Or, Implies)):
            stack += [f.left, f.right]
    for t in formula_terms(phi):
        for s in subterms(t):
            if isinstance(s, Var) and s.type is not None:
                best = max(best, degree(s.type))
    return best


def qfac_skolemize(phi: Formula) -> Formula:
    """(ALL x:s)(EX y:t) A(x,y)  to  (EX Y:s->t)(ALL x:s) A(x, Y(x)), A quantifier-free."""
    if not (isinstance(phi, ForAll) and isinstance(phi.body, Exists)):
        raise ShapeMismatch("expected a formula of the form (ALL x:s)(EX y:t) A(x,y)")
    x, s = phi.var, phi.type
    y, t = phi.body.var, phi.body.type
    body = phi.body.body
    if not is_quantifier_free(body):
        raise ShapeMismatch("the matrix A(x,y) must be quantifier-free")
    if x == y:
        raise ShapeMismatch("the two quantified variables must be distinct")
    taken = names_in(phi)
    Y = fresh_name(y.upper(), taken)
    image = App(Var(Y), Var(x))
    matrix = map_terms(body, lambda term: substitute(term, y, image))
    return Exists(Y, Arrow(s, t), ForAll(x, s, matrix))
