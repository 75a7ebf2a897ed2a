"""Normal-order reduction for combinator terms.

    PI a b            -> a
    SIGMA a b c       -> a c (b c)
    R0 f m 0          -> m
    R0 f m (n+1)      -> f n (R0 f m n)
    + * < = on numerals compute (< and = return 1 for true, 0 for false)

The head is reduced to weak head normal form first; arguments are
normalized left to right only once the head is stuck.  The recursor's
third argument is a strict position: it is reduced until it is a numeral
or a stuck ``t + k`` sum.
"""

from __future__ import annotations

from .syntax import App, Const, Num, Term, app, spine


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"no normal form within {budget} reduction steps")
        self.budget = budget


_ARITH = {
    "+": lambda a, b: a + b,
    "*": lambda a, b: a * b,
    "<": lambda a, b: int(a < b),
    "=": lambda a, b: int(a == b),
}


class _Reducer:
    def __init__(self, budget: int):
        self.budget = budget
        self.steps = 0
        self.memo: dict[Term, Term] = {}

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(self.budget)

    def contract(self, head: Term, args: list[Term]) -> Term | None:
        """One head step, or None if the head is stuck."""
        if not isinstance(head, Const):
            return None
        name = head.name
        if name == "PI" and len(args) >= 2:
            self.tick()
            return app(args[0], *args[2:])
        if name == "SIGMA" and len(args) >= 3:
            self.tick()
            a, b, c = args[:3]
            return app(App(App(a, c), App(b, c)), *args[3:])
        if name == "R0" and len(args) >= 3:
            f, m, n = args[:3]
            n = self.normal(n)
            if isinstance(n, Num):
                self.tick()
                if n.value == 0:
                    return app(m, *args[3:])
                pred: Term = Num(n.value - 1)
            else:
                pred = _predecessor(n)
                if pred is None:
                    return None
                self.tick()
            return app(f, pred, app(head, f, m, pred), *args[3:])
        if name in _ARITH and len(args) >= 2:
            a, b = self.normal(args[0]), self.normal(args[1])
            if isinstance(a, Num) and isinstance(b, Num):
                self.tick()
                return app(Num(_ARITH[name](a.value, b.value)), *args[2:])
        return None

    def normal(self, t: Term) -> Term:
        if t in self.memo:
            return self.memo[t]
        cur = t
        while True:
            head, args = spine(cur)
            nxt = self.contract(head, args)
            if nxt is None:
                break
            cur = nxt
        head, args = spine(cur)
        out = app(head, *(self.normal(a) for a in args))
        self.memo[t] = out
        return out


def _predecessor(n: Term) -> Term | None:
    """For a stuck sum t + k with k >= 1, the term t + (k-1) (just t when k = 1)."""
    head, args = spine(n)
    if (isinstance(head, Const) and head.name == "+" and len(args) == 2
            and isinstance(args[1], Num) and args[1].value >= 1):
        k = args[1].value - 1
        return args[0] if k == 0 else app(head, args[0], Num(k))
    return None


def normalize(t: Term, budget: int = 100_000) -> Term:
    """Normal form of t, raising BudgetExceeded after ``budget`` contractions."""
    return _Reducer(budget).normal(t)


def normalize_counted(t: Term, budget: int = 100_000) -> tuple[Term, int]:
    r = _Reducer(budget)
    return r.normal(t), r.steps


def is_normal(t: Term) -> bool:
    try:
        return normalize(t, budget=0) == t
    except BudgetExceeded:
        return False
