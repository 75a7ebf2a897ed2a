from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Ground:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Arrow:
    dom: FiniteType
    cod: FiniteType
    # numeral the type was written as (1 for 0->0, n+1 for n->0); printing only
    alias: int | None = field(default=None, compare=False)

    def __str__(self) -> str:
        if self.alias is not None:
            return str(self.alias)
        dom = f"({self.dom})" if isinstance(self.dom, Arrow) and self.dom.alias is None else str(self.dom)
        return f"{dom}->{self.cod}"


@dataclass(frozen=True)
class TVar:
    """Type variable, only produced by inference."""
    name: str

    def __str__(self) -> str:
        return f"'{self.name}"


FiniteType = Ground | Arrow | TVar

ZERO = Ground()


def pure(n: int) -> FiniteType:
    """Type n: 0, and n+1 = n -> 0."""
    t: FiniteType = ZERO
    for i in range(1, n + 1):
        t = Arrow(t, ZERO, alias=i)
    return t


def arrows(*ts: FiniteType) -> FiniteType:
    """Right-associated arrow type t1 -> t2 -> ... -> tn."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def degree(t: FiniteType) -> int:
    if isinstance(t, Ground):
        return 0
    if isinstance(t, Arrow):
        return max(degree(t.dom) + 1, degree(t.cod))
    raise ValueError(f"type {t} has no degree")


def arg_types(t: FiniteType) -> list[FiniteType]:
    """t1..tk of t = t1 -> ... -> tk -> 0."""
    out = []
    while isinstance(t, Arrow):
        out.append(t.dom)
        t = t.cod
    return out


def has_no_tvars(t: FiniteType) -> bool:
    if isinstance(t, TVar):
        return False
    if isinstance(t, Arrow):
        return has_no_tvars(t.dom) and has_no_tvars(t.cod)
    return True
