"""Separably closed subsets of [0,1], coded by a dense sequence of points."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .reals import (RealCode, certify_dist_lt, format_rational, parse_rational, pow2,
                    real_from_rational)


class EmptyEnumeration(Exception):
    pass


class SepClosedSet:
    """Closure of an enumerated sequence x_0, x_1, ... inside [0,1].

    ``exhaustive`` marks a finitely presented set whose listed points are
    all there is; only then may a positive distance lower bound be claimed.
    """

    def __init__(self, points: Sequence[RealCode] | Callable[[int], RealCode | None],
                 exhaustive: bool = False, name: str | None = None):
        if callable(points):
            self._get = points
            self.size: int | None = None
        else:
            pts = list(points)
            self._get = lambda n: pts[n] if n < len(pts) else None
            self.size = len(pts)
        if exhaustive and self.size is None:
            raise ValueError("only a finite enumeration can be exhaustive")
        self.exhaustive = exhaustive
        self.name = name

    def point(self, n: int) -> RealCode | None:
        if self.size is not None and n >= self.size:
            return None
        return self._get(n)

    def head(self, fuel: int) -> Iterator[tuple[int, RealCode]]:
        for n in range(fuel):
            x = self.point(n)
            if x is None:
                return
            yield n, x

    def scanned_all(self, fuel: int) -> bool:
        return self.size is not None and fuel >= self.size

    def ambient_violations(self, upto: int, k: int = 8) -> list[int]:
        """Indices among the first ``upto`` whose approximant strays from [0,1]."""
        e = pow2(-k)
        return [n for n, x in self.head(upto) if not (-e <= x.approx(k) <= 1 + e)]

    @classmethod
    def from_rationals(cls, qs: Iterable[Fraction | int | str], exhaustive: bool = False,
                       name: str | None = None) -> SepClosedSet:
        pts = [real_from_rational(q) for q in qs]
        return cls(pts, exhaustive=exhaustive, name=name)

    @classmethod
    def from_generator(cls, gen: Iterable[Fraction], name: str | None = None) -> SepClosedSet:
        """Lazily cached enumeration from an (infinite) generator of rationals."""
        it = iter(gen)
        cache: list[RealCode] = []
        lock = threading.Lock()

        def get(n: int) -> RealCode | None:
            with lock:
                while len(cache) <= n:
                    try:
                        cache.append(real_from_rational(next(it)))
                    except StopIteration:
                        return None
                return cache[n]

        return cls(get, name=name)


def rationals_in(intervals: Sequence[tuple[Fraction, Fraction]]) -> Iterator[Fraction]:
    """Every rational of the given closed intervals, by increasing denominator.

    Within one denominator, numerators ascend.  Each rational appears once.
    """
    q = 1
    while True:
        for lo, hi in intervals:
            for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
                if math.gcd(p, q) == 1:
                    yield Fraction(p, q)
        q += 1


def rational_set(*intervals: tuple[Fraction | int, Fraction | int]) -> SepClosedSet:
    ivs = [(Fraction(a), Fraction(b)) for a, b in intervals]
    name = " u ".join(f"[{format_rational(a)},{format_rational(b)}]" for a, b in ivs)
    return SepClosedSet.from_generator(rationals_in(ivs), name=name)


@dataclass(frozen=True)
class WitnessedUpTo:
    K: int
    witnesses: tuple[int, ...]


@dataclass(frozen=True)
class NoWitnessAt:
    k: int
    fuel: int


MembershipOutcome = WitnessedUpTo | NoWitnessAt


def member_search(x: RealCode, S: SepClosedSet, K: int, fuel: int) -> MembershipOutcome:
    """For k = 0..K find the least n < fuel with |x - x_n| < 2^-k (certified at k+3)."""
    witnesses = []
    for k in range(K + 1):
        r = pow2(-k)
        hit = next((n for n, xn in S.head(fuel) if certify_dist_lt(x, xn, r, k + 3)), None)
        if hit is None:
            return NoWitnessAt(k, fuel)
        witnesses.append(hit)
    return WitnessedUpTo(K, tuple(witnesses))


def dist_bounds(x: RealCode, S: SepClosedSet, fuel: int,
                precision: int = 8) -> tuple[Fraction, Fraction]:
    """Certified bounds on the distance from x to the scanned points.

    The lower bound is 0 unless the set is exhaustive and fully scanned.
    """
    p = precision + 1
    slack = pow2(-precision)
    dists = [abs(x.approx(p) - xn.approx(p)) for _, xn in S.head(fuel)]
    if not dists:
        raise EmptyEnumeration("no enumerated points within fuel")
    lower = Fraction(0)
    if S.exhaustive and S.scanned_all(fuel):
        lower = max(Fraction(0), min(dists) - slack)
    return lower, min(dists) + slack


@dataclass(frozen=True)
class GapInterval:
    c: Fraction
    d: Fraction
    left: int | None   # index of the nearest enumerated point on the left
    right: int | None


@dataclass(frozen=True)
class Inconclusive:
    near: int  # index of a point that could not be separated from x


def complement_gap(x: RealCode, S: SepClosedSet, k: int, fuel: int) -> GapInterval | Inconclusive:
    """An open interval around x free of the first ``fuel`` enumerated points.

    Endpoints are the outer enclosure bounds of the nearest certified
    neighbours (so within 2^-k of an enumerated point), or lie within 2^-k
    of 0 / 1 when one side has no neighbour.
    """
    p = k + 2
    e = pow2(-p)
    xq = x.approx(p)
    sep = pow2(-k)
    left: tuple[Fraction, int] | None = None
    right: tuple[Fraction, int] | None = None
    for n, xn in S.head(fuel):
        q = xn.approx(p)
        if abs(xq - q) <= sep:
            return Inconclusive(n)
        if q < xq:
            if left is None or q > left[0]:
                left = (q, n)
        elif right is None or q < right[0]:
            right = (q, n)
    c = left[0] + e if left else min(Fraction(0), xq - 2 * e)
    d = right[0] - e if right else max(Fraction(1), xq + 2 * e)
    return GapInterval(c, d, left[1] if left else None, right[1] if right else None)


def load_set(text: str) -> SepClosedSet:
    exhaustive = False
    qs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "exhaustive" and not qs and not exhaustive:
            exhaustive = True
            continue
        try:
            qs.append(parse_rational(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return SepClosedSet.from_rationals(qs, exhaustive=exhaustive)


def dump_set(S: SepClosedSet, fuel: int, precision: int = 16) -> str:
    lines = ["exhaustive"] if S.exhaustive else []
    lines += [format_rational(xn.approx(precision)) for _, xn in S.head(fuel)]
    return "\n".join(lines) + "\n"
