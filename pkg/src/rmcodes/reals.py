"""Exact rationals and reals coded as fast-converging Cauchy sequences.

A real is a total map ``k -> q_k`` of rationals with ``|q_n - q_{n+i}| < 2^-n``
for all ``n, i``.  Everything here is exact: rationals are ``fractions.Fraction``
and there is no floating point anywhere.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

ExactRational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def pow2(k: int) -> Fraction:
    """``2^k`` as an exact rational (``k`` may be negative)."""
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational in p/q form: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def ceil_log2(n: int) -> int:
    """Least ``p >= 0`` with ``2^p >= n`` (``n >= 1``)."""
    return max(0, (n - 1).bit_length())


def ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class RealCode:
    """A real number given by its approximant map ``k -> [x](k)``.

    Approximants are memoized; the cache is guarded by a lock, and a lost
    race only means a value is computed twice.
    """

    __slots__ = ("_fn", "tag", "_cache", "_lock")

    def __init__(self, fn: Callable[[int], Fraction], tag: str = "arithmetic"):
        self._fn = fn
        self.tag = tag
        self._cache: dict[int, Fraction] = {}
        self._lock = threading.Lock()

    def approx(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError("precision index must be a natural number")
        try:
            return self._cache[k]
        except KeyError:
            pass
        q = Fraction(self._fn(k))
        with self._lock:
            self._cache.setdefault(k, q)
        return q

    __call__ = approx

    def enclosure(self, k: int) -> tuple[Fraction, Fraction]:
        """Closed interval guaranteed to contain the coded real."""
        q = self.approx(k)
        e = pow2(-k)
        return q - e, q + e

    def prefix(self, k_max: int) -> list[Fraction]:
        return [self.approx(k) for k in range(k_max + 1)]

    def __add__(self, other: RealCode | Fraction | int) -> RealCode:
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other: RealCode | Fraction | int) -> RealCode:
        return add(self, neg(_coerce(other)))

    def __rsub__(self, other: RealCode | Fraction | int) -> RealCode:
        return add(_coerce(other), neg(self))

    def __mul__(self, other: RealCode | Fraction | int) -> RealCode:
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> RealCode:
        return neg(self)

    def __abs__(self) -> RealCode:
        return abs_(self)

    def __repr__(self) -> str:
        return f"RealCode<{self.tag}>({format_rational(self.approx(8))} @8)"


def _coerce(v: RealCode | Fraction | int) -> RealCode:
    if isinstance(v, RealCode):
        return v
    return real_from_rational(Fraction(v))


def real_from_rational(q: Fraction | int | str) -> RealCode:
    if isinstance(q, str):
        q = parse_rational(q)
    q = Fraction(q)
    return RealCode(lambda k: q, tag="constant")


def is_fast_cauchy_upto(seq: Callable[[int], Fraction], bound: int) -> bool:
    """Check ``|q_n - q_{n+i}| < 2^-n`` for every ``n + i <= bound``."""
    vals = [seq(k) for k in range(bound + 1)]
    return all(
        abs(vals[n] - vals[m]) < pow2(-n)
        for n in range(bound + 1)
        for m in range(n + 1, bound + 1)
    )


class _HatState:
    # incremental first-violation scan shared by every query of one code
    def __init__(self, raw: Callable[[int], Fraction]):
        self.raw = raw
        self.values: list[Fraction] = []
        self.violation: int | None = None
        self.lock = threading.Lock()

    def extend_to(self, k: int) -> None:
        while self.violation is None and len(self.values) <= k:
            j = len(self.values)
            q = Fraction(self.raw(j))
            if any(abs(self.values[n] - q) >= pow2(-n) for n in range(j)):
                self.violation = j
            else:
                self.values.append(q)

    def at(self, k: int) -> Fraction:
        with self.lock:
            self.extend_to(k)
            if k < len(self.values):
                return self.values[k]
            return self.values[-1]


def hat_normalize(raw: Callable[[int], Fraction] | Iterable[Fraction]) -> RealCode:
    """Turn any rational sequence into a real.

    The output agrees with ``raw`` up to the first index ``j`` at which some
    earlier ``raw(n)`` is ``>= 2^-n`` away from ``raw(j)``; from ``j`` on the
    output is frozen at ``raw(j-1)``.
    """
    if not callable(raw):
        table = [Fraction(v) for v in raw]
        if not table:
            raise ValueError("empty approximant table")
        raw = lambda k, _t=table: _t[min(k, len(_t) - 1)]
    state = _HatState(raw)
    return RealCode(state.at, tag="normalized")


def approx(x: RealCode, k: int) -> Fraction:
    return x.approx(k)


def add(x: RealCode, y: RealCode) -> RealCode:
    return RealCode(lambda k: x.approx(k + 1) + y.approx(k + 1))


def neg(x: RealCode) -> RealCode:
    return RealCode(lambda k: -x.approx(k))


def abs_(x: RealCode) -> RealCode:
    return RealCode(lambda k: abs(x.approx(k)))


def mul(x: RealCode, y: RealCode) -> RealCode:
    # |x| <= |x(0)| + 1, so B bounds both factors with room to spare
    bound = ceil_frac(abs(x.approx(0))) + ceil_frac(abs(y.approx(0))) + 2
    shift = ceil_log2(bound) + 1
    return RealCode(lambda k: x.approx(k + shift) * y.approx(k + shift))


def scale(x: RealCode, c: Fraction | int) -> RealCode:
    """Multiply by an exact rational constant."""
    return mul(x, real_from_rational(Fraction(c)))


def rmax(x: RealCode, y: RealCode) -> RealCode:
    return scale(x + y + abs_(x - y), Fraction(1, 2))


def rmin(x: RealCode, y: RealCode) -> RealCode:
    return scale(x + y - abs_(x - y), Fraction(1, 2))


def clamp(x: RealCode, lo: Fraction, hi: Fraction) -> RealCode:
    return rmin(rmax(x, real_from_rational(lo)), real_from_rational(hi))


@dataclass(frozen=True)
class Apart:
    sign: int  # -1: x < y, +1: x > y
    k: int


@dataclass(frozen=True)
class IndistinguishableAt:
    k: int


RealComparison = Apart | IndistinguishableAt


def eq_upto(x: RealCode, y: RealCode, k: int) -> RealComparison:
    d = x.approx(k) - y.approx(k)
    if abs(d) > pow2(-k + 2):
        return Apart(1 if d > 0 else -1, k)
    return IndistinguishableAt(k)


# Certified comparisons against rationals.  Each answers True only when the
# enclosure at precision k settles the question.

def certify_lt(x: RealCode, q: Fraction, k: int) -> bool:
    return x.approx(k) + pow2(-k) < q


def certify_gt(x: RealCode, q: Fraction, k: int) -> bool:
    return x.approx(k) - pow2(-k) > q


def certify_dist_lt(x: RealCode, y: RealCode, r: Fraction, k: int) -> bool:
    """``|x - y| < r`` settled at precision ``k``."""
    return abs(x.approx(k) - y.approx(k)) + pow2(-k + 1) < r


def certify_dist_gt(x: RealCode, y: RealCode, r: Fraction, k: int) -> bool:
    return abs(x.approx(k) - y.approx(k)) - pow2(-k + 1) > r


def format_snapshot(x: RealCode, k_max: int) -> str:
    lines = [f"realcode k_max={k_max}"]
    lines += [f"{k} {format_rational(x.approx(k))}" for k in range(k_max + 1)]
    return "\n".join(lines) + "\n"


def parse_snapshot_table(text: str) -> list[Fraction]:
    """The raw approximants of a snapshot, exactly as written."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty realcode snapshot")
    m = re.fullmatch(r"realcode\s+k_max=(\d+)", lines[0])
    if not m:
        raise ValueError(f"line 1: bad snapshot header {lines[0]!r}")
    k_max = int(m.group(1))
    if len(lines) != k_max + 2:
        raise ValueError(f"expected {k_max + 1} approximant lines, got {len(lines) - 1}")
    table = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2 or not parts[0].isdigit() or int(parts[0]) != lineno - 2:
            raise ValueError(f"line {lineno}: expected '{lineno - 2} p/q', got {ln!r}")
        table.append(parse_rational(parts[1]))
    return table


def parse_snapshot(text: str) -> RealCode:
    """Read a snapshot back; indices past ``k_max`` repeat the last value."""
    table = parse_snapshot_table(text)
    code = hat_normalize(table)
    code.tag = "constant" if len(set(table)) == 1 else "normalized"
    return code
