"""Named functions, sets and potentials shared by the scenarios, the
acceptance suite and the command line."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .codes import Modulus
from .extensions import Potential, RealFn
from .reals import RealCode, abs_, clamp, mul, real_from_rational, rmin, scale
from .sepclosed import SepClosedSet, rational_set
from .sequences import BaireSeq, embed_real

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class SuiteFunction:
    """A function on [0,1] given twice: on codes, and exactly on rationals."""
    name: str
    real: RealFn
    exact: Callable[[Fraction], Fraction]
    modulus: Modulus

    def on_rational(self, q: Fraction) -> RealCode:
        return self.real(real_from_rational(q))


def _c(q) -> RealCode:
    return real_from_rational(Fraction(q))


SUITE: dict[str, SuiteFunction] = {
    f.name: f for f in [
        SuiteFunction("identity", lambda x: x, lambda q: q, Modulus.shifted(0)),
        SuiteFunction("one-minus", lambda x: _c(1) - x, lambda q: 1 - q, Modulus.shifted(0)),
        SuiteFunction("abs-half", lambda x: abs_(x - _c(HALF)), lambda q: abs(q - HALF),
                      Modulus.shifted(0)),
        # slope at most 1 on [0,1/2] and flat afterwards
        SuiteFunction("min-square", lambda x: rmin(mul(x, x), _c(QUARTER)),
                      lambda q: min(q * q, QUARTER), Modulus.shifted(0)),
    ]
}

# 0 on [0,1/3], 1 on [2/3,1], linear in between
STEP = SuiteFunction("step", lambda x: clamp(scale(x, 3) - _c(1), Fraction(0), Fraction(1)),
                     lambda q: min(max(3 * q - 1, Fraction(0)), Fraction(1)),
                     Modulus.shifted(2))

SQUARE = SuiteFunction("square", lambda x: mul(x, x), lambda q: q * q, Modulus.shifted(1))

FUNCTIONS: dict[str, SuiteFunction] = {**SUITE, STEP.name: STEP, SQUARE.name: SQUARE}


def two_intervals() -> SepClosedSet:
    """[0,1/3] u [2/3,1], enumerated as its rationals by increasing denominator."""
    return rational_set((0, Fraction(1, 3)), (Fraction(2, 3), 1))


# on the two-interval set points closer than 1/4 lie in the same part
TWO_INTERVAL_MODULUS = Modulus.constant(2)


def one_point_threshold(k: int) -> Fraction:
    """0 < x < 2^-ceil(k/2) forces x^2 < 2^-k."""
    return Fraction(1, 1 << ((k + 1) // 2))


def _first_entry(g: BaireSeq) -> RealCode:
    return _c(g(0))


def _inverse_power(g: BaireSeq) -> RealCode:
    return _c(Fraction(1, 1 << g(0)))


def constant_potential(c: Fraction) -> Potential:
    return Potential(lambda g: _c(c), Modulus.constant(0), name=f"constant {c}")


POTENTIALS: dict[str, Potential] = {
    # agreement on k+1 entries keeps r(f) and r(g) strictly within 2^-k
    "embed": Potential(embed_real, Modulus.shifted(1), name="embed"),
    "first-bit": Potential(_first_entry, Modulus.constant(1), name="first-bit"),
    "inverse-power": Potential(_inverse_power, Modulus.constant(1), name="inverse-power"),
    "constant": constant_potential(HALF),
}
