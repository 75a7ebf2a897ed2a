"""Bracket abstraction over the PI (K) and SIGMA (S) combinators.

    [x] x        = SIGMA PI PI
    [x] t        = PI t                 x not free in t
    [x] (u x)    = u                    x not free in u
    [x] (u v)    = SIGMA ([x]u) ([x]v)

Combinators get explicit type parameters whenever the types involved are
fully determined by the context; otherwise they are left for inference.
"""

from __future__ import annotations

from typing import Mapping

from .syntax import App, Const, Term, Var, free_vars
from .typecheck import TypeMismatch, infer
from .types import Arrow, FiniteType, has_no_tvars


def _type_of(t: Term, ctx: Mapping[str, FiniteType]) -> FiniteType | None:
    try:
        ty = infer(t, ctx)
    except TypeMismatch:
        return None
    return ty if has_no_tvars(ty) else None


def _params(*ts: FiniteType | None) -> tuple[FiniteType, ...] | None:
    return None if any(t is None for t in ts) else tuple(ts)


def lambda_abstract(x: str, ty: FiniteType, body: Term,
                    ctx: Mapping[str, FiniteType] | None = None) -> Term:
    """A combinator term t with no free x such that t a reduces like body[x := a]."""
    inner = dict(ctx or {})
    inner[x] = ty
    return _abstract(x, ty, body, inner)


def _abstract(x: str, ty: FiniteType, body: Term, ctx: dict[str, FiniteType]) -> Term:
    if isinstance(body, Var) and body.name == x:
        tt = Arrow(ty, ty)
        return App(App(Const("SIGMA", (ty, tt, ty)), Const("PI", (ty, tt))), Const("PI", (ty, ty)))
    if x not in free_vars(body):
        return App(Const("PI", _params(_type_of(body, ctx), ty)), body)
    assert isinstance(body, App)
    u, v = body.fn, body.arg
    if isinstance(v, Var) and v.name == x and x not in free_vars(u):
        return u
    sigma = _type_of(v, ctx)
    tau = _type_of(body, ctx)
    return App(App(Const("SIGMA", _params(ty, sigma, tau)), _abstract(x, ty, u, ctx)),
               _abstract(x, ty, v, ctx))
