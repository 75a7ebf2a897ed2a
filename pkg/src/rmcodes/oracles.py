"""Fuel-bounded stand-ins for comprehension functionals, the dovetailing
domain decider, and the continuous/discontinuous dispatch combinator."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .codes import Associate, Modulus
from .outcomes import NeedFuel
from .reals import RealCode, pow2, real_from_rational
from .sequences import BaireSeq, BinSeq, FinSeq, fan_enumerate, format_finseq


@dataclass
class Fuel:
    budget: int
    consumed: int = 0

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError(f"fuel budget {self.budget} is negative")

    def spend(self, n: int = 1) -> bool:
        """Consume n units if available."""
        if self.consumed + n > self.budget:
            return False
        self.consumed += n
        return True

    @property
    def left(self) -> int:
        return self.budget - self.consumed


def _fuel(f: Fuel | int) -> Fuel:
    return f if isinstance(f, Fuel) else Fuel(int(f))


@dataclass(frozen=True)
class Found:
    witness: Any


@dataclass(frozen=True)
class ExhaustedAt:
    budget: int


OracleOutcome = Found | ExhaustedAt


@dataclass(frozen=True)
class Probe:
    step: int
    kind: str
    input: str
    outcome: str

    def __str__(self) -> str:
        return f"{self.step} {self.kind} {self.input} {self.outcome}"


Log = list  # list[Probe], appended to when passed


def mu_search(f: BaireSeq, fuel: Fuel | int, log: Log | None = None) -> OracleOutcome:
    """Least n with f(n) = 0, scanning one index per unit of fuel."""
    fuel = _fuel(fuel)
    n = 0
    while fuel.spend():
        v = f(n)
        if log is not None:
            log.append(Probe(fuel.consumed, "mu", f"f({n})", str(v)))
        if v == 0:
            return Found(n)
        n += 1
    return ExhaustedAt(fuel.budget)


def exists2_search(f: BaireSeq, fuel: Fuel | int, log: Log | None = None) -> OracleOutcome:
    """Search for a zero of f; a hit is re-checked before it is reported."""
    fuel = _fuel(fuel)
    seen: list[int] = []
    while fuel.spend():
        seen.append(f(len(seen)))
        if log is not None:
            log.append(Probe(fuel.consumed, "exists2", f"f({len(seen) - 1})", str(seen[-1])))
        if 0 in seen:
            n = seen.index(0)
            assert f(n) == 0
            return Found(n)
    return ExhaustedAt(fuel.budget)


@dataclass(frozen=True)
class SurvivesTo:
    depth: int
    witness: FinSeq


@dataclass(frozen=True)
class NoPathOfLength:
    length: int


def suslin_depth_check(f: Callable[[FinSeq], int], depth: int) -> SurvivesTo | NoPathOfLength:
    """Look for sigma of length ``depth`` over {0..depth-1} with f = 0 on all its prefixes.

    A hit is only a necessary condition for the existence of an infinite
    path; it never certifies one.
    """
    deepest = -1

    def dfs(sigma: FinSeq) -> FinSeq | None:
        nonlocal deepest
        if f(sigma) != 0:
            return None
        deepest = max(deepest, len(sigma))
        if len(sigma) == depth:
            return sigma
        for v in range(depth):
            hit = dfs(sigma + (v,))
            if hit is not None:
                return hit
        return None

    hit = dfs(())
    if hit is not None:
        return SurvivesTo(depth, hit)
    return NoPathOfLength(deepest + 1)


class ModulusViolation(Exception):
    pass


@dataclass(frozen=True)
class NoneAtDepth:
    depth: int


def kappa0_search(Y: Callable[[BinSeq], int], m: int, spot_checks: int = 4,
                  max_depth: int = 22) -> Found | NoneAtDepth:
    """Decide "exists f in 2^N with Y(f) = 0" for Y determined by f's first m bits.

    Each prefix is extended by zeros; for the first ``spot_checks`` prefixes
    (and the last) the all-ones extension is also evaluated and must agree.
    """
    prefixes = list(fan_enumerate(m, max_depth))
    checked = set(range(min(spot_checks, len(prefixes)))) | {len(prefixes) - 1}
    found = None
    for i, sigma in enumerate(prefixes):
        v = Y(BinSeq.from_list(sigma))
        if i in checked:
            w = Y(BinSeq.from_list(sigma, tail=1))
            if w != v:
                raise ModulusViolation(
                    f"Y differs on two extensions of {format_finseq(sigma)}: {v} vs {w}")
        if v == 0 and found is None:
            found = sigma
    return Found(found) if found is not None else NoneAtDepth(m)


class WitnessInvalid(Exception):
    pass


FuelledRealFn = Callable[[RealCode, int], RealCode]


@dataclass
class Functional2:
    """A type-two functional taking a Baire sequence and a fuel budget."""
    name: str
    fn: Callable[[BaireSeq, int], Any]

    def __call__(self, g: BaireSeq, fuel: int) -> Any:
        return self.fn(g, fuel)


MU = Functional2("mu", mu_search)
EXISTS2 = Functional2("exists2", exists2_search)


def step_surrogate(x: RealCode, fuel: int) -> RealCode:
    """1 if x is certified positive within ``fuel`` precision steps, else 0.

    Genuinely discontinuous at 0, hence not computable: the "0" answer is
    a guess once fuel runs out.
    """
    for k in range(fuel + 1):
        if x.approx(k) > pow2(-k):
            return real_from_rational(1)
    return real_from_rational(0)


def grilliot_extract(F: FuelledRealFn, x0: RealCode, seq: Callable[[int], RealCode],
                     delta: Fraction, checks: int = 8) -> Functional2:
    """Turn a discontinuity of F at x0 into a fuel-bounded existence oracle.

    Requires |seq(n) - x0| <= 2^-n and |F(seq(n)) - F(x0)| >= delta.  For
    g, the real y_g follows x0 until the least zero m of g and seq(m)
    afterwards (approximants shifted by 2 to stay fast-Cauchy), so
    F(y_g) is delta-far from F(x0) exactly when g has a zero.
    """
    delta = Fraction(delta)
    for n in range(checks):
        p = n + 4
        if abs(seq(n).approx(p) - x0.approx(p)) - pow2(-p + 1) > pow2(-n):
            raise WitnessInvalid(f"seq({n}) is not within 2^-{n} of x0")
        fa, fb = F(seq(n), checks + 4), F(x0, checks + 4)
        q = 2 + max(0, -(delta.numerator.bit_length() - delta.denominator.bit_length())) + 2
        if abs(fa.approx(q) - fb.approx(q)) + pow2(-q + 1) < delta:
            raise WitnessInvalid(f"F(seq({n})) is not delta-apart from F(x0)")

    def functional(g: BaireSeq, fuel: int) -> Any:
        def y(k: int) -> Fraction:
            for m in range(k):
                if g(m) == 0:
                    return seq(m).approx(k + 2)
            return x0.approx(k + 2)

        yg = RealCode(y, tag="diagonal")
        fy, f0 = F(yg, fuel), F(x0, fuel)
        for p in range(2, fuel + 3):
            d = abs(fy.approx(p) - f0.approx(p))
            e = pow2(-p + 1)
            if d - e >= delta / 2:
                # a zero certainly exists, so this search terminates
                n = 0
                while g(n) != 0:
                    n += 1
                return Found(n)
            if d + e < delta / 2:
                return ExhaustedAt(fuel)
        return NeedFuel(fuel)

    return Functional2("grilliot", functional)


@dataclass(frozen=True)
class InD:
    steps: int


@dataclass(frozen=True)
class NotInD:
    steps: int


class BothCertified(Exception):
    pass


Refuter = Callable[[BinSeq, int], bool]  # True when step t exhibits x outside D


def domain_decider(alpha: Associate, refuter: Refuter, x: BinSeq,
                   fuel: Fuel | int) -> InD | NotInD | NeedFuel:
    """Decide x in D given that D is exactly the domain of alpha.

    "alpha(x) is defined" is searched one prefix per step and interleaved
    with the refuter's search for a reason x is not in D.  Whichever side
    certifies first wins; the other side is run to the same step, and a
    double certification means the hypothesis was false.
    """
    fuel = _fuel(fuel)
    sigma: list[int] = []
    defined_at: int | None = None
    refuted_at: int | None = None
    t = 0
    while True:
        if not fuel.spend():
            return NeedFuel(fuel.consumed)
        if t:
            sigma.append(x(t - 1))
        if alpha[sigma] != 0 and defined_at is None:
            defined_at = t
        if defined_at is not None:
            break
        if not fuel.spend():
            return NeedFuel(fuel.consumed)
        if refuter(x, t):
            refuted_at = t
            break
        t += 1
    if defined_at is not None and refuter(x, t):
        raise BothCertified(f"{x!r}: alpha defined at step {defined_at} and refuted at {t}")
    if refuted_at is not None and any(alpha[sigma[:i]] for i in range(len(sigma) + 1)):
        raise BothCertified(f"{x!r}: refuted at step {refuted_at} but alpha is defined")
    if defined_at is not None:
        return InD(fuel.consumed)
    return NotInD(fuel.consumed)


@dataclass(frozen=True)
class ModulusWitness:
    modulus: Modulus


@dataclass(frozen=True)
class DiscontinuityWitness:
    F: FuelledRealFn
    x0: RealCode
    seq: Callable[[int], RealCode]
    delta: Fraction


WitnessSource = Callable[[int], tuple[ModulusWitness | DiscontinuityWitness | None, list[str]]]


class BranchError(Exception):
    def __init__(self, branch: str, cause: Exception):
        super().__init__(f"[{branch}] {type(cause).__name__}: {cause}")
        self.branch = branch
        self.cause = cause


@dataclass
class DispatchResult:
    branch: str  # continuous | discontinuous | none
    result: Any
    transcript: list[str] = field(default_factory=list)


def em_dispatch(task: Any, cont_method: Callable[[Any, Modulus], Any],
                disc_method: Callable[[Any, Functional2], Any],
                witness_source: WitnessSource, fuel: int) -> DispatchResult:
    """Case split: a modulus goes to cont_method, a discontinuity (turned
    into an existence oracle) goes to disc_method."""
    if fuel <= 0:
        return DispatchResult("none", NeedFuel(0), ["no fuel for the witness source"])
    witness, transcript = witness_source(fuel)
    transcript = list(transcript)
    if isinstance(witness, ModulusWitness):
        transcript.append(f"branch continuous: modulus {witness.modulus!r}")
        try:
            return DispatchResult("continuous", cont_method(task, witness.modulus), transcript)
        except Exception as exc:
            raise BranchError("continuous", exc) from exc
    if isinstance(witness, DiscontinuityWitness):
        transcript.append("branch discontinuous: extracting existence oracle")
        try:
            oracle = grilliot_extract(witness.F, witness.x0, witness.seq, witness.delta)
            return DispatchResult("discontinuous", disc_method(task, oracle), transcript)
        except Exception as exc:
            raise BranchError("discontinuous", exc) from exc
    transcript.append("no witness within fuel")
    return DispatchResult("none", NeedFuel(fuel), transcript)
