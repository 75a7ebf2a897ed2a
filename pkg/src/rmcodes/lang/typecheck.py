"""Principal-type inference by unification.

Unannotated variables and unparameterized PI/SIGMA get fresh type
variables; the result is renamed canonically ('a, 'b, ... in order of
first appearance) so equal principal types compare equal.
"""

from __future__ import annotations

from itertools import count
from typing import Mapping

from .syntax import (And, Atom, Const, Formula, Implies, Not, Num, Or,
                     Pred, Term, Var, show_term)
from .types import ZERO, Arrow, FiniteType, TVar, arrows, pure

Context = Mapping[str, FiniteType]


class TypeMismatch(TypeError):
    def __init__(self, message: str, expected: FiniteType | None = None,
                 found: FiniteType | None = None, span=None):
        super().__init__(message)
        self.expected = expected
        self.found = found
        self.span = span


class _Solver:
    def __init__(self, ctx: Context | None):
        self.ctx = dict(ctx or {})
        self.subst: dict[str, FiniteType] = {}
        self.env: dict[str, FiniteType] = {}  # types assigned to free, unannotated names
        self.fresh = (f"t{i}" for i in count())

    def new(self) -> TVar:
        return TVar(next(self.fresh))

    def resolve(self, t: FiniteType) -> FiniteType:
        while isinstance(t, TVar) and t.name in self.subst:
            t = self.subst[t.name]
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.dom), self.resolve(t.cod))
        return t

    def occurs(self, name: str, t: FiniteType) -> bool:
        t = self.resolve(t)
        if isinstance(t, TVar):
            return t.name == name
        if isinstance(t, Arrow):
            return self.occurs(name, t.dom) or self.occurs(name, t.cod)
        return False

    def unify(self, a: FiniteType, b: FiniteType) -> bool:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, TVar) or isinstance(b, TVar):
            if isinstance(b, TVar) and not isinstance(a, TVar):
                a, b = b, a
            if a == b:
                return True
            if self.occurs(a.name, b):
                return False
            self.subst[a.name] = b
            return True
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            return self.unify(a.dom, b.dom) and self.unify(a.cod, b.cod)
        return a == b

    def var_type(self, v: Var) -> FiniteType:
        known = self.ctx.get(v.name, self.env.get(v.name))
        if known is None:
            known = v.type if v.type is not None else self.new()
            self.env[v.name] = known
        if v.type is not None and not self.unify(v.type, known):
            raise TypeMismatch(
                f"variable {v.name} annotated {v.type} but used at type {self.resolve(known)}",
                v.type, self.resolve(known), v.span)
        return known

    def const_type(self, c: Const) -> FiniteType:
        if c.name in ("+", "*", "<", "="):
            return arrows(ZERO, ZERO, ZERO)
        if c.name == "R0":
            return arrows(arrows(ZERO, ZERO, ZERO), ZERO, ZERO, ZERO)
        if c.name == "EvalAssoc":
            return arrows(pure(1), pure(1), ZERO)
        params = c.params or tuple(self.new() for _ in range(2 if c.name == "PI" else 3))
        if c.name == "PI":
            s, t = params
            return arrows(s, t, s)
        r, s, t = params
        return arrows(arrows(r, s, t), arrows(r, s), r, t)

    def infer(self, t: Term) -> FiniteType:
        if isinstance(t, Num):
            return ZERO
        if isinstance(t, Var):
            return self.var_type(t)
        if isinstance(t, Const):
            return self.const_type(t)
        fn_t = self.infer(t.fn)
        arg_t = self.infer(t.arg)
        res = self.new()
        if not self.unify(fn_t, Arrow(arg_t, res)):
            f, a = self.resolve(fn_t), self.resolve(arg_t)
            if isinstance(f, Arrow):
                msg = (f"{show_term(t.fn)} expects an argument of type {f.dom}, "
                       f"but {show_term(t.arg)} has type {a}")
                raise TypeMismatch(msg, f.dom, a, t.span)
            msg = (f"{show_term(t.fn)} has type {f}, which is not a function type, "
                   f"but is applied to {show_term(t.arg)} of type {a}")
            raise TypeMismatch(msg, Arrow(a, res), f, t.span)
        return res

    def check_formula(self, phi: Formula) -> None:
        if isinstance(phi, Atom):
            for side in (phi.lhs, phi.rhs):
                ty = self.infer(side)
                if not self.unify(ty, ZERO):
                    found = self.resolve(ty)
                    raise TypeMismatch(
                        f"{show_term(side)} has type {found} but '{phi.rel}' compares type 0",
                        ZERO, found, phi.span)
        elif isinstance(phi, Pred):
            for a in phi.args:
                self.infer(a)
        elif isinstance(phi, Not):
            self.check_formula(phi.body)
        elif isinstance(phi, (And, Or, Implies)):
            self.check_formula(phi.left)
            self.check_formula(phi.right)
        else:
            outer = self.ctx.get(phi.var)
            self.ctx[phi.var] = phi.type
            try:
                self.check_formula(phi.body)
            finally:
                if outer is None:
                    del self.ctx[phi.var]
                else:
                    self.ctx[phi.var] = outer


def canonical(t: FiniteType, names: dict[str, str] | None = None) -> FiniteType:
    names = {} if names is None else names
    if isinstance(t, TVar):
        if t.name not in names:
            i = len(names)
            names[t.name] = chr(ord("a") + i) if i < 26 else f"t{i}"
        return TVar(names[t.name])
    if isinstance(t, Arrow):
        return Arrow(canonical(t.dom, names), canonical(t.cod, names))
    return t


def infer(t: Term, ctx: Context | None = None) -> FiniteType:
    """Principal type of t, with raw (non-canonical) type variables."""
    s = _Solver(ctx)
    return s.resolve(s.infer(t))


def infer_env(t: Term, ctx: Context | None = None) -> tuple[FiniteType, dict[str, FiniteType]]:
    """Principal type plus the types inferred for t's free, undeclared variables."""
    s = _Solver(ctx)
    ty = s.infer(t)
    names: dict[str, str] = {}
    out = canonical(s.resolve(ty), names)
    env = {k: canonical(s.resolve(v), names) for k, v in s.env.items()}
    return out, env


def typecheck(t: Term, ctx: Context | None = None) -> FiniteType:
    """Canonical principal type of t under ctx; raises TypeMismatch."""
    return infer_env(t, ctx)[0]


def check_formula(phi: Formula, ctx: Context | None = None) -> dict[str, FiniteType]:
    """Typecheck phi; returns the inferred types of its free undeclared variables."""
    s = _Solver(ctx)
    s.check_formula(phi)
    names: dict[str, str] = {}
    return {k: canonical(s.resolve(v), names) for k, v in s.env.items()}
