"""Constructive cores: Tietze and one-point extension, Bernstein approximation,
and epsilon-minimizer search on Cantor and (bounded) Baire space."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Callable

from .codes import REFINE_BITS, Modulus
from .outcomes import EvalOutcome, NeedFuel, Value
from .reals import RealCode, ceil_frac, ceil_log2, clamp, pow2, real_from_rational, scale
from .sepclosed import (GapInterval, Inconclusive, SepClosedSet, WitnessedUpTo,
                        complement_gap, member_search)
from .sequences import (DEFAULT_FAN_DEPTH, BaireSeq, BinSeq, FinSeq, bounded_enumerate,
                        fan_enumerate)

RealFn = Callable[[RealCode], RealCode]

DEGREE_CAP = 4096
DEFAULT_FAN_BUDGET = 16


class InconsistentModulus(Exception):
    pass


class DegreeBudgetExceeded(Exception):
    pass


@dataclass
class PartialFnOnSet:
    """A function known (and uniformly continuous with ``modulus``) on S's closure."""
    values: RealFn
    S: SepClosedSet
    modulus: Modulus


def tietze_extend(f: PartialFnOnSet, x: RealCode, k: int, fuel: int) -> EvalOutcome:
    """Value at x of the gap-interpolating extension of f, to within 2^-k.

    Points witnessed in the set (to level k+2) take f's own value.  Points
    in a complementary gap get the linear interpolation between f at the
    nearest enumerated neighbours; a gap open towards 0 or 1 extends the
    neighbour's value as a constant.
    """
    return tietze_extend_traced(f, x, k, fuel)[0]


def tietze_extend_traced(f: PartialFnOnSet, x: RealCode, k: int, fuel: int
                         ) -> tuple[EvalOutcome, GapInterval | None]:
    """tietze_extend, also returning the gap used (None for witnessed members)."""
    if isinstance(member_search(x, f.S, k + 2, fuel), WitnessedUpTo):
        return Value(f.values(x).approx(k), k), None
    # k+4 separates every point the membership scan failed to witness
    gap = complement_gap(x, f.S, k + 4, fuel)
    if isinstance(gap, Inconclusive) or (gap.left is None and gap.right is None):
        return NeedFuel(fuel), None
    if gap.left is None or gap.right is None:
        side = f.S.point(gap.right if gap.left is None else gap.left)
        return Value(f.values(side).approx(k), k), gap
    xl, xr = f.S.point(gap.left), f.S.point(gap.right)
    fl, fr = f.values(xl), f.values(xr)
    _check_modulus(f.modulus, xl, xr, fl, fr, k)
    p = k + 8
    cl, cr = xl.approx(p), xr.approx(p)
    t = clamp(scale(x - real_from_rational(cl), 1 / (cr - cl)), Fraction(0), Fraction(1))
    g = fl + (fr - fl) * t
    return Value(g.approx(k), k), gap


def _check_modulus(omega: Modulus, xl: RealCode, xr: RealCode,
                   fl: RealCode, fr: RealCode, k: int) -> None:
    for m in range(k + 1):
        p = m + 3
        close = abs(xl.approx(omega(m) + 3) - xr.approx(omega(m) + 3)) + pow2(-omega(m) - 2) < pow2(-omega(m))
        far = abs(fl.approx(p) - fr.approx(p)) - pow2(-p + 1) >= pow2(-m)
        if close and far:
            raise InconsistentModulus(
                f"set points closer than 2^-{omega(m)} have values at least 2^-{m} apart")


def one_point_extend(f: RealFn, nu: Callable[[int], Fraction], x: RealCode,
                     k: int) -> EvalOutcome:
    """Extension of f from (0,1) by the value 0 at 0.

    ``nu(j)`` is a threshold with 0 < x < nu(j) implying |f(x)| < 2^-j.
    Points certified below nu(k+1) get 0; points certified positive get f.
    """
    delta = Fraction(nu(k + 1))
    for p in range(k + 2, k + 3 + REFINE_BITS):
        q, e = x.approx(p), pow2(-p)
        if abs(q) + e < delta:
            return Value(Fraction(0), k)
        if q - e > 0:
            return Value(f(x).approx(k), k)
    return NeedFuel(REFINE_BITS)


@dataclass
class PolyApprox:
    """Polynomial in the Bernstein basis of degree ``len(coefficients) - 1``."""
    coefficients: tuple[Fraction, ...]
    error_bound: Fraction | None = None  # certified sup error on [0,1], when known
    _power: tuple[list[int], int] | None = field(default=None, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _power_basis(self) -> tuple[list[int], int]:
        # p(x) = sum_k C(m,k) (Delta^k c)_0 x^k, kept as integers over a common denominator
        if self._power is None:
            m = self.degree
            den = lcm(*(c.denominator for c in self.coefficients))
            row = [c.numerator * (den // c.denominator) for c in self.coefficients]
            out = []
            for k in range(m + 1):
                out.append(comb(m, k) * row[0])
                row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
            self._power = (out, den)
        return self._power

    def evaluate(self, x: Fraction | int) -> Fraction:
        x = Fraction(x)
        coeffs, den = self._power_basis()
        m = self.degree
        u, v = x.numerator, x.denominator
        acc = coeffs[m]
        if v & (v - 1) == 0:
            s = v.bit_length() - 1
            for k in range(m - 1, -1, -1):
                acc = acc * u + (coeffs[k] << (s * (m - k)))
        else:
            vp = 1
            for k in range(m - 1, -1, -1):
                vp *= v
                acc = acc * u + coeffs[k] * vp
        return Fraction(acc, den * v ** m)

    def lipschitz_bound(self) -> Fraction:
        c = self.coefficients
        if len(c) < 2:
            return Fraction(0)
        return self.degree * max(abs(c[i + 1] - c[i]) for i in range(len(c) - 1))


def bernstein_from_degree(F: RealFn, m: int, precision: int,
                          error_bound: Fraction | None = None) -> PolyApprox:
    coeffs = tuple(F(real_from_rational(Fraction(i, m))).approx(precision)
                   for i in range(m + 1))
    return PolyApprox(coeffs, error_bound)


def bernstein_approx(F: RealFn, omega: Modulus, n: int, cap: int = DEGREE_CAP) -> PolyApprox:
    """Bernstein polynomial within 2^-n of F on [0,1].

    Degree m = 4^omega(n+2) makes m^-1/2 = 2^-omega(n+2), so the classical
    bound (3/2) omega_F(m^-1/2) gives (3/2) 2^-(n+2); coefficient rounding
    adds at most 2^-(n+3).
    """
    m = 4 ** omega(n + 2)
    if m > cap:
        raise DegreeBudgetExceeded(f"degree {m} exceeds cap {cap}; lower n")
    bound = Fraction(3, 2) * pow2(-(n + 2)) + pow2(-(n + 3))
    assert bound < pow2(-n)
    return bernstein_from_degree(F, m, n + 3, error_bound=pow2(-n))


@dataclass
class RestrictReport:
    checked: int
    violations: list[int]
    uncertain: list[int]


def restrict_check(p: PolyApprox, F: RealFn, S: SepClosedSet, n: int,
                   samples: int) -> RestrictReport:
    """Check |F(x) - p(x)| < 2^-n at the first enumerated points of S."""
    target = pow2(-n)
    lip = p.lipschitz_bound()
    q = n + 6 + ceil_log2(int(lip) + 1)
    slack = pow2(-q) * (1 + lip)
    violations, uncertain = [], []
    checked = 0
    for idx, xi in S.head(samples):
        checked += 1
        d = abs(F(xi).approx(q) - p.evaluate(xi.approx(q)))
        if d + slack < target:
            continue
        (violations if d - slack >= target else uncertain).append(idx)
    return RestrictReport(checked, violations, uncertain)


@dataclass
class Potential:
    evaluator: Callable[[BaireSeq], RealCode]
    modulus: Modulus  # agreeing on the first modulus(k) entries => values within 2^-k
    name: str = "potential"


@dataclass
class EkelandCertificate:
    depth: int
    precision: int
    evaluated: int
    epsilon: Fraction
    minimal: bool         # chosen approximant <= every evaluated approximant
    inequality: bool      # P(f*) <= P(g) + epsilon, certified for every evaluated g
    variational_certified: int    # g with P(f*) < P(g) + epsilon*d(f*, g) certified
    variational_uncertified: int


@dataclass
class EkelandResult:
    prefix: FinSeq
    minimizer: BaireSeq
    value: RealCode
    value_approx: Fraction
    certificate: EkelandCertificate


def _prefix_distance(s: FinSeq, t: FinSeq) -> Fraction:
    for i, (a, b) in enumerate(zip(s, t)):
        if a != b:
            return pow2(-i)
    return Fraction(0)


def _minimize(P: Potential, k: int, candidates, make) -> EkelandResult:
    depth = P.modulus(k + 1)
    p = k + 2
    rows: list[tuple[FinSeq, BaireSeq, RealCode, Fraction]] = []
    best = None
    for sigma in candidates(depth):
        g = make(sigma)
        val = P.evaluator(g)
        v = val.approx(p)
        rows.append((sigma, g, val, v))
        if best is None or v < best[3]:
            best = rows[-1]
    sigma, g, val, v = best
    eps = pow2(-k)
    e = pow2(-p)
    minimal = all(v <= r[3] for r in rows)
    inequality = all(v + e <= r[3] - e + eps for r in rows)
    var_ok = sum(1 for r in rows if r[0] != sigma
                 and v + e < r[3] - e + eps * _prefix_distance(sigma, r[0]))
    cert = EkelandCertificate(depth, p, len(rows), eps, minimal, inequality,
                              var_ok, len(rows) - 1 - var_ok)
    return EkelandResult(sigma, g, val, v, cert)


def ekeland_search(P: Potential, k: int, budget: int = DEFAULT_FAN_BUDGET) -> EkelandResult:
    """Lexicographically least 2^-k-minimizer of P over Cantor space.

    Every prefix of length modulus(k+1) is extended by zeros and evaluated
    at precision k+2; since each point of 2^N agrees with one of these on
    that prefix, the winner is within 2^-k of the infimum.
    """
    return _minimize(P, k, lambda d: fan_enumerate(d, min(budget, DEFAULT_FAN_DEPTH)),
                     BinSeq.from_list)


def ekeland_search_baire(P: Potential, branching: int | None, k: int,
                         budget: int = DEFAULT_FAN_BUDGET) -> EkelandResult:
    """As ekeland_search over {0..branching-1}^N.

    An explicit branching bound is mandatory: the unbounded search is refused.
    """
    if branching is None or branching < 1:
        raise ValueError("a positive branching bound is required; unbounded Baire search is refused")
    return _minimize(P, k, lambda d: bounded_enumerate(branching, d, 1 << budget),
                     BaireSeq.from_list)


def gap_slope_bound(f: PartialFnOnSet, gaps: list[tuple[int, int]], precision: int = 16) -> Fraction:
    """Upper bound on the interpolation slopes |f(x_r) - f(x_l)| / (x_r - x_l) over the gaps."""
    e = pow2(-precision)
    best = Fraction(0)
    for left, right in gaps:
        xl, xr = f.S.point(left), f.S.point(right)
        width = xr.approx(precision) - xl.approx(precision) - 2 * e
        if width <= 0:
            raise ValueError(f"gap between points {left} and {right} is too narrow at precision {precision}")
        rise = abs(f.values(xr).approx(precision) - f.values(xl).approx(precision)) + 2 * e
        best = max(best, rise / width)
    return best


def extension_modulus(omega_S: Modulus, slope: Fraction) -> Modulus:
    """Modulus of the gap-interpolating extension.

    Inside a gap the extension is Lipschitz with constant ``slope``; a pair
    straddling set points pays at most two gap segments plus one ω_S step,
    each kept below 2^-(k+2).
    """
    c = ceil_log2(max(1, ceil_frac(slope)))
    return Modulus(lambda k: max(omega_S(k + 2), k + 2 + c), name=f"max(w_S(k+2), k+{2 + c})")
