"""Second-order codes for continuous functions.

Two flavours: Kleene associates on sequence spaces (a table from finite
sequences to naturals, 0 meaning "no information yet" and m+1 meaning
"the output is m"), and neighbourhood-condition codes on [0,1] (a stream of
quadruples ``(a, r, b, s)`` read as "|x - a| < r implies |F(x) - b| <= s").
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

from .outcomes import EvalOutcome, Inconsistent, NeedFuel, Value
from .reals import RealCode, format_rational, parse_rational, pow2, real_from_rational
from .sequences import BaireSeq, FinSeq, format_finseq, parse_finseq

# extra bits tried when a point sits too close to a ball boundary at k+3
REFINE_BITS = 24


class Modulus:
    """A map k -> k' with |x - y| < 2^-k' implying |F(x) - F(y)| < 2^-k."""

    def __init__(self, fn: Callable[[int], int], name: str | None = None):
        self._fn = fn
        self.name = name
        self._cache: dict[int, int] = {}

    def __call__(self, k: int) -> int:
        if k not in self._cache:
            v = int(self._fn(k))
            if v < 0:
                raise ValueError(f"modulus value {v} at {k} is negative")
            self._cache[k] = v
        return self._cache[k]

    @classmethod
    def shifted(cls, c: int) -> Modulus:
        return cls(lambda k: k + c, name=f"k+{c}" if c else "k")

    @classmethod
    def constant(cls, c: int) -> Modulus:
        return cls(lambda k: c, name=str(c))

    def is_monotone(self, upto: int) -> bool:
        return all(self(k) <= self(k + 1) for k in range(upto))

    def __repr__(self) -> str:
        return f"Modulus({self.name or '?'})"


class Associate:
    def __init__(self, table: Mapping[Sequence[int], int] | None = None,
                 fn: Callable[[FinSeq], int] | None = None):
        if (table is None) == (fn is None):
            raise ValueError("give exactly one of table= or fn=")
        self.table = None if table is None else {tuple(k): int(v) for k, v in table.items()}
        self._fn = fn
        self.max_len = None if self.table is None else max(map(len, self.table), default=-1)

    def __getitem__(self, sigma: Sequence[int]) -> int:
        sigma = tuple(sigma)
        if self.table is not None:
            return self.table.get(sigma, 0)
        return int(self._fn(sigma))

    def violations(self) -> list[tuple[FinSeq, FinSeq]]:
        """Pairs (shorter, longer) along a prefix chain with different nonzero values."""
        if self.table is None:
            raise ValueError("only table associates can be checked exhaustively")
        bad = []
        for tau, v in self.table.items():
            if v == 0:
                continue
            for i in range(len(tau)):
                u = self.table.get(tau[:i], 0)
                if u and u != v:
                    bad.append((tau[:i], tau))
        return bad


def eval_assoc(alpha: Associate, f: BaireSeq, fuel: int) -> EvalOutcome:
    """Read the first nonzero entry along f among prefixes of length <= fuel."""
    limit = fuel if alpha.max_len is None else min(fuel, alpha.max_len)
    found: tuple[int, int] | None = None
    sigma: list[int] = []
    for n in range(limit + 1):
        if n:
            sigma.append(f(n - 1))
        v = alpha[sigma]
        if v == 0:
            continue
        if found is None:
            found = (n, v)
        elif v != found[1]:
            return Inconsistent((tuple(sigma[:found[0]]), tuple(sigma)))
    if found is None:
        return NeedFuel(fuel)
    return Value(found[1] - 1, found[0])


@dataclass(frozen=True)
class Quad:
    a: Fraction
    r: Fraction
    b: Fraction
    s: Fraction

    def __post_init__(self):
        if self.r <= 0 or self.s <= 0:
            raise ValueError("quadruple radii must be positive")


class NbhdCode:
    """An indexable (restartable) stream of quadruples."""

    def __init__(self, source: Sequence[Quad] | Callable[[int], Quad | None],
                 length: int | None = None):
        if callable(source):
            self._get = source
            self.length = length
        else:
            quads = list(source)
            self._get = lambda i: quads[i] if i < len(quads) else None
            self.length = len(quads)

    def __getitem__(self, i: int) -> Quad | None:
        if self.length is not None and i >= self.length:
            return None
        return self._get(i)

    def head(self, n: int | None = None) -> Iterator[Quad]:
        if n is None:
            if self.length is None:
                raise ValueError("infinite code needs an explicit fuel")
            n = self.length
        for i in range(n):
            q = self[i]
            if q is None:
                return
            yield q

    def __len__(self) -> int:
        if self.length is None:
            raise TypeError("infinite code has no length")
        return self.length

    def inconsistencies(self, n: int | None = None) -> list[tuple[int, int]]:
        quads = list(self.head(n))
        return [(i, j) for i in range(len(quads)) for j in range(i + 1, len(quads))
                if _overlap(quads[i], quads[j])
                and abs(quads[i].b - quads[j].b) > quads[i].s + quads[j].s]


def _overlap(p: Quad, q: Quad) -> bool:
    return abs(p.a - q.a) < p.r + q.r


def ball_status(x: RealCode, a: Fraction, r: Fraction, k: int) -> bool | None:
    """Is |x - a| < r?  True/False when certified, None near the boundary.

    Starts at working precision k+3 and refines up to REFINE_BITS more bits;
    a point exactly on the boundary is never decided.
    """
    for p in range(k + 3, k + 4 + REFINE_BITS):
        d = abs(x.approx(p) - a)
        e = pow2(-p)
        if d + e < r:
            return True
        if d - e >= r:
            return False
    return None


def eval_code(code: NbhdCode, x: RealCode, k: int, fuel: int | None = None) -> EvalOutcome:
    """Value of the coded function at x to within 2^-k.

    All quadruples among the first ``fuel`` are scanned so that a pair of
    applicable, mutually contradictory quadruples is reported before any
    value is returned.
    """
    target = pow2(-k)
    applicable: list[tuple[int, Quad]] = []
    chosen: Quad | None = None
    scanned = 0
    for i, q in enumerate(code.head(fuel)):
        scanned = i + 1
        if ball_status(x, q.a, q.r, k) is not True:
            continue
        for j, p in applicable:
            if abs(p.b - q.b) > p.s + q.s:
                return Inconsistent((j, i))
        applicable.append((i, q))
        if chosen is None and q.s <= target:
            chosen = q
    if chosen is None:
        return NeedFuel(scanned)
    return Value(chosen.b, k)


def code_from_modulus(F: Callable[[Fraction], RealCode], omega: Modulus,
                      k_max: int) -> NbhdCode:
    """Neighbourhood code for F on [0,1] built from a modulus of uniform continuity.

    Level k contributes balls of radius 2^-w, w = omega(k+2), centred on the
    grid i*2^-w, with value approx(F(centre), k+2) and slack 2^-k.
    """
    index: list[tuple[int, int, int]] = []
    for k in range(k_max + 1):
        w = omega(k + 2)
        index.extend((k, w, i) for i in range((1 << w) + 1))
    cache: dict[int, Quad] = {}
    lock = threading.Lock()

    def get(n: int) -> Quad | None:
        if n >= len(index):
            return None
        if n not in cache:
            k, w, i = index[n]
            a = Fraction(i, 1 << w)
            q = Quad(a, pow2(-w), F(a).approx(k + 2), pow2(-k))
            with lock:
                cache[n] = q
        return cache[n]

    return NbhdCode(get, length=len(index))


def modulus_from_code(code: NbhdCode, k: int, fuel: int | None = None) -> int | NeedFuel:
    """Uniform modulus value at k read off a finite cover of [0,1].

    Greedily chains balls with slack <= 2^-(k+1) from 0 past 1; half the
    smallest overlap of consecutive chain members is a Lebesgue number, so
    points closer than it share a ball and their values differ by <= 2^-k.
    """
    bound = pow2(-(k + 1))
    intervals = sorted((q.a - q.r, q.a + q.r) for q in code.head(fuel) if q.s <= bound)
    chain: list[tuple[Fraction, Fraction]] = []
    cur = Fraction(0)
    best: tuple[Fraction, Fraction] | None = None
    i = 0
    while True:
        # among balls opening strictly left of cur, take the one reaching furthest
        # (ties: the widest, which keeps the overlap with its predecessor largest)
        while i < len(intervals) and intervals[i][0] < cur:
            iv = intervals[i]
            if best is None or iv[1] > best[1]:
                best = iv
            i += 1
        if best is None or best[1] <= cur:
            return NeedFuel(len(intervals))
        chain.append(best)
        if best[1] > 1:
            break
        cur = best[1]
    if len(chain) == 1:
        return 0
    overlap = min(left[1] - right[0] for left, right in zip(chain, chain[1:]))
    lebesgue = overlap / 2
    kp = 0
    while pow2(-kp) > lebesgue:
        kp += 1
    return kp


def extract_modulus(code: NbhdCode, fuel: int | None = None) -> Modulus:
    """Modulus object over modulus_from_code; raises LookupError on exhaustion."""
    def fn(k: int) -> int:
        v = modulus_from_code(code, k, fuel)
        if isinstance(v, NeedFuel):
            raise LookupError(f"no finite cover at k={k} within fuel")
        return v
    return Modulus(fn, name="from-code")


@dataclass
class TotalityReport:
    covered: int
    total: int
    uncovered: list[Fraction]

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.covered, self.total)


def totality_report(code: NbhdCode, k: int, grid_depth: int,
                    fuel: int | None = None) -> TotalityReport:
    n = 1 << grid_depth
    uncovered = []
    for i in range(n + 1):
        x = Fraction(i, n)
        if not isinstance(eval_code(code, real_from_rational(x), k, fuel), Value):
            uncovered.append(x)
    return TotalityReport(n + 1 - len(uncovered), n + 1, uncovered)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def load_nbhd_code(text: str) -> NbhdCode:
    quads = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip(line)
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'a r b s', got {line!r}")
        try:
            quads.append(Quad(*(parse_rational(p) for p in parts)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return NbhdCode(quads)


def dump_nbhd_code(code: NbhdCode, n: int | None = None) -> str:
    return "".join(" ".join(format_rational(v) for v in (q.a, q.r, q.b, q.s)) + "\n"
                   for q in code.head(n))


def load_associate(text: str) -> Associate:
    table = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip(line)
        if not line:
            continue
        head, sep, val = line.rpartition("]")
        try:
            v = int(val)
            if v < 0:
                raise ValueError
            table[parse_finseq(head + sep)] = v
        except ValueError:
            raise ValueError(f"line {lineno}: expected '[s] v' with v >= 0, got {line!r}") from None
    return Associate(table)


def dump_associate(alpha: Associate) -> str:
    if alpha.table is None:
        raise ValueError("only table associates can be written out")
    items = sorted(alpha.table.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return "".join(f"{format_finseq(s)} {v}\n" for s, v in items)
