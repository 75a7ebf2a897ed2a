"""The acceptance suite: ten property checks, each anchored to one
constructive core, with a runtime bound per check."""

from __future__ import annotations

import random
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable

from .builtins import POTENTIALS, STEP, SUITE, TWO_INTERVAL_MODULUS, two_intervals
from .codes import Associate
from .extensions import (PartialFnOnSet, PolyApprox, ekeland_search, tietze_extend)
from .lang import (App, BudgetExceeded, Const, Exists, ForAll, Num, Var, app, ecf_translate,
                   infer_env, max_quantifier_degree, normalize, parse_term, typecheck)
from .lang.syntax import Atom
from .lang.types import pure
from .oracles import (BothCertified, ExhaustedAt, Found, InD, NotInD, domain_decider,
                      exists2_search, mu_search)
from .reals import (RealCode, hat_normalize, is_fast_cauchy_upto, pow2, real_from_rational)
from .report import FAIL, PASS, Check, RunReport
from .scenarios import (bernstein_grid_error, grilliot_agreement, heine_modulus_check,
                        onepoint_threshold_check, tietze_grid_check)
from .sequences import BaireSeq, BinSeq, embed_real, fan_enumerate

CheckResult = tuple[bool, str]


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    tags: frozenset[str]
    bound_s: float | None
    run: Callable[[random.Random], CheckResult]


# 1: fast-Cauchy invariant

def random_realcode(rng: random.Random, depth: int = 3) -> RealCode:
    kind = rng.choice(["const", "sum", "product", "embed", "hat"] if depth else ["const", "embed", "hat"])
    if kind == "const":
        return real_from_rational(Fraction(rng.randint(-50, 50), rng.randint(1, 40)))
    if kind == "sum":
        return random_realcode(rng, depth - 1) + random_realcode(rng, depth - 1)
    if kind == "product":
        return random_realcode(rng, depth - 1) * random_realcode(rng, depth - 1)
    if kind == "embed":
        bits = [rng.randint(0, 1) for _ in range(rng.randint(0, 24))]
        return embed_real(BinSeq.from_list(bits, tail=rng.randint(0, 1)))
    # noise that sometimes breaks the fast-Cauchy condition
    centre = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
    scale = rng.choice([1, 2, 4])
    noise = [Fraction(rng.randint(-scale * 64, scale * 64), 64 << k) for k in range(30)]
    return hat_normalize(lambda k: centre + noise[min(k, 29)])


def _fast_cauchy(rng: random.Random) -> CheckResult:
    bad = sum(not is_fast_cauchy_upto(random_realcode(rng).approx, 20) for _ in range(200))
    return bad == 0, f"200 codes, all pairs n+i <= 20 checked exactly; {bad} violations"


# 2: Tietze core

def _tietze(rng: random.Random) -> CheckResult:
    S = two_intervals()
    f = PartialFnOnSet(STEP.real, S, TWO_INTERVAL_MODULUS)
    fuel = 600
    mid = tietze_extend(f, real_from_rational(Fraction(1, 2)), 4, fuel)
    mid_ok = getattr(mid, "payload", None) is not None and abs(mid.payload - Fraction(1, 2)) <= pow2(-4)
    k = 6
    tested = bad = 0
    for _, xn in S.head(50):
        out = tietze_extend(f, xn, k, fuel)
        tested += 1
        if getattr(out, "payload", None) is None or abs(out.payload - STEP.real(xn).approx(k)) >= pow2(-k + 1):
            bad += 1
    violations, pairs, notes, omega_G, _ = tietze_grid_check(f, 8, 6, fuel)
    ok = mid_ok and bad == 0 and violations == 0 and not notes
    return ok, (f"value at 1/2: {mid}; {tested} member points, {bad} disagreements; "
                f"grid depth 8: {pairs} pairs under {omega_G.name}, {violations} violations"
                + "".join("; " + n for n in notes))


# 3: Weierstrass core

def bernstein_direct(values: list[Fraction], x: Fraction) -> Fraction:
    m = len(values) - 1
    return sum(c * comb(m, i) * x ** i * (1 - x) ** (m - i) for i, c in enumerate(values))


def _weierstrass(rng: random.Random) -> CheckResult:
    parts, ok = [], True
    for fn in SUITE.values():
        m, err = bernstein_grid_error(fn, 3, 10)
        ok &= err < pow2(-3)
        parts.append(f"{fn.name}: degree {m}, error {float(err):.5f}")
    coeffs = [Fraction(i, 2) ** 2 for i in range(3)]
    b2 = PolyApprox(tuple(coeffs)).evaluate(Fraction(1, 2))
    exact = b2 == Fraction(3, 8) == bernstein_direct(coeffs, Fraction(1, 2))
    ok &= exact and b2 - Fraction(1, 4) == Fraction(1, 8)
    parts.append(f"B2(x^2)(1/2) = {b2}")
    return ok, "; ".join(parts)


# 4: Heine core

def _heine(rng: random.Random) -> CheckResult:
    parts, ok = [], True
    for fn in SUITE.values():
        table, tested, violations = heine_modulus_check(fn, 6, 10_000, rng)
        ok &= violations == 0
        parts.append(f"{fn.name}: {tested} pairs, {violations} violations")
    return ok, "; ".join(parts)


# 5: one-point extension

def _onepoint(rng: random.Random) -> CheckResult:
    tested, violations, stuck = onepoint_threshold_check(8, 100, rng)
    return violations == 0 and stuck == 0, \
        f"{tested} points below the threshold for k <= 8, {violations} violations, {stuck} NeedFuel"


# 6: Ekeland on Cantor space

def _brute_minimum(P, depth: int) -> tuple[tuple[int, ...], Fraction]:
    exact = {
        "embed": lambda s: sum(Fraction(b, 2 << i) for i, b in enumerate(s)),
        "first-bit": lambda s: Fraction(s[0] if s else 0),
    }[P.name]
    best = min(fan_enumerate(depth), key=lambda s: (exact(s), s))
    return best, exact(best)


def _ekeland(rng: random.Random) -> CheckResult:
    parts, ok = [], True
    for name in ("embed", "first-bit"):
        P = POTENTIALS[name]
        res = ekeland_search(P, 3)
        sigma, value = _brute_minimum(P, res.certificate.depth)
        good = (res.prefix == sigma and res.value_approx == value and res.certificate.minimal
                and res.certificate.inequality and res.certificate.depth <= 12)
        ok &= good
        parts.append(f"{name}: minimizer {list(res.prefix)} value {res.value_approx} over "
                     f"{res.certificate.evaluated} prefixes")
    return ok, "; ".join(parts)


# 7: oracle agreement

def _oracles(rng: random.Random) -> CheckResult:
    total, bad = grilliot_agreement(10, 10)
    mu_bad = 0
    for bits in product((0, 1), repeat=10):
        g = BaireSeq.from_list(list(bits), tail=1)
        brute = next((i for i, b in enumerate(bits) if b == 0), None)
        out = mu_search(g, 10)
        expect = Found(brute) if brute is not None else ExhaustedAt(10)
        mu_bad += out != expect or exists2_search(g, 10) != expect
    return bad == 0 and mu_bad == 0, \
        f"grilliot vs exists2: {total} sequences, {bad} disagreements; mu vs brute force: {mu_bad} mismatches"


# 8: dovetailing decider

def clopen_instance(rng: random.Random) -> tuple[Associate, Callable[[BinSeq, int], bool], Callable[[tuple], bool]]:
    """A clopen D (given by prefixes of length L) with an associate whose
    domain is exactly D and a refuter that notices x outside D late."""
    L = rng.randint(1, 4)
    accepted = {s for s in product((0, 1), repeat=L) if rng.random() < 0.5}
    extra = rng.randint(0, 2)    # the associate commits only after extra more bits
    delay = rng.randint(0, 3)    # the refuter answers only after delay more steps
    table = {}
    for s in accepted:
        for tail in product((0, 1), repeat=extra):
            table[s + tail] = 1 + (sum(s) % 3)
    alpha = Associate(table)

    def refuter(x: BinSeq, t: int) -> bool:
        return t >= L + delay and tuple(x(i) for i in range(L)) not in accepted

    def member(bits: tuple) -> bool:
        return bits[:L] in accepted

    return alpha, refuter, member


def _decider(rng: random.Random) -> CheckResult:
    wrong = both = stuck = 0
    xs = list(product((0, 1), repeat=6))
    for _ in range(20):
        alpha, refuter, member = clopen_instance(rng)
        for bits in xs:
            x = BinSeq.from_list(list(bits))
            try:
                out = domain_decider(alpha, refuter, x, 1000)
            except BothCertified:
                both += 1
                continue
            if isinstance(out, InD):
                wrong += not member(bits)
            elif isinstance(out, NotInD):
                wrong += member(bits)
            else:
                stuck += 1
    return wrong == 0 and both == 0 and stuck == 0, \
        f"20 instances x 64 points: {wrong} wrong, {both} BothCertified, {stuck} NeedFuel"


# 9: System T and ECF

ADD = r"\n:0. \m:0. R0 (\k:0. \acc:0. acc + 1) n m"
MUL = r"\n:0. \m:0. R0 (\k:0. \acc:0. acc + n) 0 m"

TERM_SUITE = [
    "R0 f m 0", "R0 f m (n + 1)", "R0 f m 3", "PI a b", "SIGMA a b c", "PI[0,0] 1 2",
    "SIGMA[0,0,0] (+) (PI[0,0] 1) 4", "+ 2 3", "* 4 5", "< 2 3", "= 3 3",
    ADD, MUL, f"({ADD}) 2 3", f"({MUL}) 3 4", r"\x:0. x", r"(\x:0. x) 5",
    r"\f:1. \x:0. f (f x)", r"(\f:1. \x:0. f (f x)) (\y:0. y * 2) 3",
    r"R0 (\k:0. \acc:0. acc * 2) 1 5", r"\x:1. x 0", "f:1 (g:1 n:0)",
]


def random_formula(rng: random.Random, env: dict[str, int], depth: int):
    from .lang import And, Implies, Not, Or
    if depth == 0 or rng.random() < 0.2:
        return Atom(rng.choice("=<"), _random_ground(rng, env, 2), _random_ground(rng, env, 2))
    r = rng.random()
    if r < 0.45:
        d = rng.choice([0, 1, 2])
        name = f"{'nfY'[d]}{len(env)}"
        inner = {**env, name: d}
        body = random_formula(rng, inner, depth - 1)
        return (ForAll if rng.random() < 0.5 else Exists)(name, pure(d), body)
    if r < 0.6:
        return Not(random_formula(rng, env, depth - 1))
    op = rng.choice([And, Or, Implies])
    return op(random_formula(rng, env, depth - 1), random_formula(rng, env, depth - 1))


def _random_ground(rng: random.Random, env: dict[str, int], depth: int):
    by_type = {d: [v for v, t in env.items() if t == d] for d in (0, 1, 2)}
    options = ["num"]
    if by_type[0]:
        options.append("var")
    if by_type[1] and depth:
        options.append("apply1")
    if by_type[2] and by_type[1]:
        options.append("apply2")
    kind = rng.choice(options)
    if kind == "num":
        return Num(rng.randint(0, 9))
    if kind == "var":
        return Var(rng.choice(by_type[0]))
    if kind == "apply1":
        return App(Var(rng.choice(by_type[1])), _random_ground(rng, env, depth - 1))
    return App(Var(rng.choice(by_type[2])), Var(rng.choice(by_type[1])))


def _system_t(rng: random.Random) -> CheckResult:
    parts, ok = [], True
    f, m, n = Var("f"), Var("m"), Var("n")
    r0 = Const("R0")
    law0 = normalize(app(r0, f, m, Num(0))) == m
    succ = normalize(app(r0, f, m, app(Const("+"), n, Num(1))))
    law1 = succ == app(f, n, app(r0, f, m, n))
    numeric = all(normalize(app(r0, f, m, Num(j + 1))) ==
                  normalize(app(f, Num(j), app(r0, f, m, Num(j)))) for j in range(6))
    ok &= law0 and law1 and numeric
    parts.append(f"recursor laws: {law0 and law1 and numeric}")

    add, mul = parse_term(ADD), parse_term(MUL)
    arith_bad = sum(normalize(app(add, Num(a), Num(b))) != Num(a + b) or
                    normalize(app(mul, Num(a), Num(b))) != Num(a * b)
                    for a in range(13) for b in range(13))
    ok &= arith_bad == 0
    parts.append(f"add/mul on 0..12: {arith_bad} mismatches")

    ecf_bad = 0
    for _ in range(30):
        phi = random_formula(rng, {}, 4)
        out = ecf_translate(phi)
        ecf_bad += max_quantifier_degree(out) > 1 or ecf_translate(out) != out
    ok &= ecf_bad == 0
    parts.append(f"ecf on 30 formulas: {ecf_bad} failures")

    sr_bad = 0
    for text in TERM_SUITE:
        t = parse_term(text)
        ty, env = infer_env(t)
        try:
            nf = normalize(t, 100_000)
        except BudgetExceeded:
            sr_bad += 1
            continue
        sr_bad += typecheck(nf, env) != ty
    ok &= sr_bad == 0
    parts.append(f"subject reduction on {len(TERM_SUITE)} terms: {sr_bad} failures")
    return ok, "; ".join(parts)


# 10: determinism

def _determinism(rng: random.Random, seed: int = 0) -> CheckResult:
    first = run_acceptance(None, seed, _exclude_determinism=True, enforce_bounds=False)
    second = run_acceptance(None, seed, _exclude_determinism=True, enforce_bounds=False)
    a, b = first.to_json(include_time=False), second.to_json(include_time=False)
    return a == b, f"two runs with seed {seed}: reports {'identical' if a == b else 'differ'} ({len(a)} bytes)"


CRITERIA = [
    Criterion(1, "fast-Cauchy invariant", frozenset({"reals", "fast-cauchy"}), 5, _fast_cauchy),
    Criterion(2, "Tietze core", frozenset({"tietze", "extensions"}), 5, _tietze),
    Criterion(3, "Weierstrass core", frozenset({"weierstrass", "bernstein", "extensions"}), 10, _weierstrass),
    Criterion(4, "Heine core", frozenset({"heine", "codes", "modulus"}), 10, _heine),
    Criterion(5, "one-point extension", frozenset({"onepoint", "extensions"}), 2, _onepoint),
    Criterion(6, "Ekeland core on Cantor space", frozenset({"ekeland", "extensions"}), 5, _ekeland),
    Criterion(7, "oracle agreement", frozenset({"oracles", "grilliot", "mu"}), 5, _oracles),
    Criterion(8, "dovetail decider", frozenset({"oracles", "decider", "dovetail"}), 5, _decider),
    Criterion(9, "System T / ECF", frozenset({"lang", "system-t", "ecf"}), 5, _system_t),
    Criterion(10, "determinism", frozenset({"determinism"}), None, None),
]


def select(tag: str | None) -> list[Criterion]:
    if tag is None:
        return list(CRITERIA)
    t = tag.lower().lstrip("c#")
    return [c for c in CRITERIA if t == str(c.number) or tag.lower() in c.tags]


def run_criterion(c: Criterion, seed: int, enforce_bounds: bool = True) -> tuple[Check, float]:
    rng = random.Random(f"{seed}:criterion-{c.number}")
    start = time.perf_counter()
    try:
        ok, details = _determinism(rng, seed) if c.number == 10 else c.run(rng)
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, details = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if enforce_bounds and c.bound_s is not None and elapsed >= c.bound_s:
        ok = False
        details += f"; runtime {elapsed:.2f}s exceeds {c.bound_s:g}s"
    name = f"{c.number}. {c.name}"
    return Check(name, PASS if ok else FAIL, details), elapsed


def run_acceptance(tag: str | None = None, seed: int = 0, *, enforce_bounds: bool = True,
                   _exclude_determinism: bool = False) -> RunReport:
    chosen = select(tag)
    if tag is not None and not chosen:
        warnings.warn(f"no acceptance criterion matches {tag!r}; nothing to run", stacklevel=2)
    if _exclude_determinism:
        chosen = [c for c in chosen if c.number != 10]
    rep = RunReport("accept", {"filter": tag}, seed, "all constructive cores")
    start = time.perf_counter()
    for c in chosen:
        result, elapsed = run_criterion(c, seed, enforce_bounds)
        rep.checks.append(result)
        rep.timings_ms[str(c.number)] = elapsed * 1000
    rep.elapsed_ms = (time.perf_counter() - start) * 1000
    return rep


def report_lines(rep: RunReport) -> list[str]:
    """One line per criterion: status, name, runtime and details."""
    out = []
    for c in rep.checks:
        number = c.name.split(".", 1)[0]
        ms = rep.timings_ms.get(number)
        timing = f" [{ms / 1000:.2f}s]" if ms is not None else ""
        out.append(f"{c.status.upper()}  {c.name}{timing}: {c.details}")
    return out
