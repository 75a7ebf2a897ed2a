"""Finite types, System T terms, formulas, and the passes over them."""

from .bracket import lambda_abstract
from .parser import ParseError, parse_formula, parse_term, parse_type
from .passes import (DegreeTooHigh, ECFUnsupported, ShapeMismatch, ecf_translate,
                     max_quantifier_degree, qfac_skolemize)
from .reduce import BudgetExceeded, is_normal, normalize, normalize_counted
from .syntax import (And, App, Atom, Const, Exists, ForAll, Formula, Implies, Not, Num, Or,
                     Pred, Term, Var, app, show_formula, show_term, substitute)
from .typecheck import TypeMismatch, check_formula, infer_env, typecheck
from .types import ZERO, Arrow, FiniteType, Ground, TVar, arrows, degree, pure

__all__ = [name for name in dir() if not name.startswith("_")]
