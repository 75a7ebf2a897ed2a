"""Scenario runner: each scenario runs one constructive core end to end and
reports its checks."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .builtins import (FUNCTIONS, POTENTIALS, SQUARE, STEP, SUITE, TWO_INTERVAL_MODULUS,
                       SuiteFunction, one_point_threshold, two_intervals)
from .codes import Modulus, code_from_modulus, eval_code, modulus_from_code
from .extensions import (DEGREE_CAP, PartialFnOnSet, bernstein_approx, ekeland_search,
                         ekeland_search_baire, extension_modulus, gap_slope_bound,
                         one_point_extend, restrict_check, tietze_extend,
                         tietze_extend_traced)
from .lang import (ParseError, TypeMismatch, check_formula, ecf_translate, max_quantifier_degree,
                   parse_formula, show_formula)
from .lang.passes import ECFUnsupported
from .oracles import (ExhaustedAt, Found, ModulusViolation, NoneAtDepth, WitnessInvalid,
                      exists2_search, grilliot_extract, kappa0_search, mu_search,
                      step_surrogate, suslin_depth_check)
from .outcomes import NeedFuel, Value
from .reals import format_rational, pow2, real_from_rational
from .report import FAIL, INCONCLUSIVE, PASS, Check, RunReport, check
from .sepclosed import SepClosedSet, load_set
from .sequences import BaireSeq, format_finseq

DEFAULT_FUEL = 100_000
DEFAULT_DEPTH = 16
DEFAULT_PRECISION = 8

# fuel used for the many membership/gap scans of a grid check; a single
# query may use the full budget
GRID_FUEL = 600
GRID_PRECISION = 6

SCENARIOS = ("tietze", "heine", "weierstrass", "onepoint", "ekeland-cantor",
             "ekeland-baire", "ecf-demo", "oracle-demo")

TRACE = {
    "tietze": "summary table / Tietze extension (TIE) / higher-order column",
    "heine": "summary table / Heine uniform continuity (HEI) / higher-order column",
    "weierstrass": "summary table / Weierstrass approximation (WEI) / higher-order column",
    "onepoint": "summary table / one-point extension / higher-order column",
    "ekeland-cantor": "summary table / Ekeland variational principle (FVP) on Cantor space / higher-order column",
    "ekeland-baire": "summary table / Ekeland variational principle (FVP) on Baire space / higher-order column",
    "ecf-demo": "base theory / ECF interpretation of type-2 quantifiers",
    "oracle-demo": "base theory / comprehension functionals and the excluded-middle case split",
}


class ConfigError(Exception):
    """Bad scenario configuration; the message says where."""


@dataclass
class ScenarioSpec:
    name: str
    k: int | None = None
    fuel: int = DEFAULT_FUEL
    depth: int = DEFAULT_DEPTH
    seed: int = 0
    set_file: str | None = None
    function: str | None = None
    formula: str | None = None
    potential: str | None = None
    branching: int | None = None
    extra: dict = field(default_factory=dict)


def _frac(q: Fraction) -> str:
    return format_rational(Fraction(q))


# tietze

def tietze_grid_check(f: PartialFnOnSet, depth: int, k: int, fuel: int
                      ) -> tuple[int, int, list[str], Modulus | None, Fraction]:
    """Check the computed extension modulus on the dyadic grid of the given depth.

    Returns (violations, pairs checked, notes, modulus, slope bound).  Values
    are computed at precision k; pairs closer than 2^-ω_G(j) must differ by
    less than 2^-j up to the 2^(1-k) evaluation slack.
    """
    n = 1 << depth
    values: list[Fraction | None] = []
    gaps: set[tuple[int, int]] = set()
    notes: list[str] = []
    for i in range(n + 1):
        x = real_from_rational(Fraction(i, n))
        out, gap = tietze_extend_traced(f, x, k, fuel)
        values.append(out.payload if isinstance(out, Value) else None)
        if gap is not None and gap.left is not None and gap.right is not None:
            gaps.add((gap.left, gap.right))
    missing = [i for i, v in enumerate(values) if v is None]
    if missing:
        notes.append(f"{len(missing)} grid points without a value")
    slope = gap_slope_bound(f, sorted(gaps))
    omega_G = extension_modulus(f.modulus, slope)
    violations = pairs = 0
    slack = pow2(1 - k)
    for j in range(k):
        w = omega_G(j)
        if w >= depth:
            break
        span = (1 << (depth - w)) - 1  # grid steps strictly inside 2^-w
        for a in range(n + 1):
            for b in range(a + 1, min(n, a + span) + 1):
                va, vb = values[a], values[b]
                if va is None or vb is None:
                    continue
                pairs += 1
                if abs(va - vb) - slack >= pow2(-j):
                    violations += 1
    return violations, pairs, notes, omega_G, slope


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None


def _load_set(path: str) -> SepClosedSet:
    try:
        return load_set(_read(path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _function(name: str | None, default: SuiteFunction) -> SuiteFunction:
    if name is None:
        return default
    if name not in FUNCTIONS:
        raise ConfigError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    return FUNCTIONS[name]


def _tietze(spec: ScenarioSpec, rep: RunReport) -> None:
    k = 4 if spec.k is None else spec.k
    default_set = spec.set_file is None
    S = two_intervals() if default_set else _load_set(spec.set_file)
    fn = _function(spec.function, STEP)
    omega = TWO_INTERVAL_MODULUS if default_set and fn is STEP else fn.modulus
    f = PartialFnOnSet(fn.real, S, omega)
    fuel = spec.fuel
    rep.params.update(k=k, fuel=fuel, grid_fuel=min(fuel, GRID_FUEL), function=fn.name,
                      set=S.name or spec.set_file, modulus=repr(omega))

    mid = tietze_extend(f, real_from_rational(Fraction(1, 2)), k, fuel)
    if isinstance(mid, NeedFuel):
        rep.checks.append(Check("value at 1/2", INCONCLUSIVE, f"NeedFuel({mid.consumed})"))
    elif default_set and fn is STEP:
        err = abs(mid.payload - Fraction(1, 2))
        rep.checks.append(check("value at 1/2", err <= pow2(-k),
                                f"{_frac(mid.payload)} (interpolating (1/3,0) and (2/3,1)), "
                                f"|error| = {_frac(err)} <= 2^-{k}"))
    else:
        rep.checks.append(Check("value at 1/2", PASS, f"{_frac(mid.payload)} at precision {k}"))

    grid_fuel = min(fuel, GRID_FUEL)
    agree_k = 6
    bad, tested = [], 0
    for n, xn in S.head(50):
        out = tietze_extend(f, xn, agree_k, grid_fuel)
        if not isinstance(out, Value):
            continue
        tested += 1
        if abs(out.payload - fn.real(xn).approx(agree_k)) >= pow2(-agree_k + 1) - pow2(-agree_k):
            bad.append(n)
    rep.checks.append(check("agreement on set points", not bad and tested > 0,
                            f"{tested} enumerated points at k={agree_k}, {len(bad)} disagreements"))

    depth = min(spec.depth, 8)
    violations, pairs, notes, omega_G, slope = tietze_grid_check(f, depth, GRID_PRECISION, grid_fuel)
    rep.checks.append(check("extension modulus on grid", violations == 0,
                            f"depth {depth}, slope bound {_frac(slope)}, modulus {omega_G.name}, "
                            f"{pairs} pairs, {violations} violations" + "".join("; " + s for s in notes)))


# heine

def heine_modulus_check(fn: SuiteFunction, k_max: int, samples: int, rng: random.Random
                        ) -> tuple[dict[int, int], int, int]:
    """Extract a modulus from the code built out of fn's modulus and test it on
    random dyadic pairs with exact arithmetic.  Returns (modulus table,
    pairs tested, violations)."""
    code = code_from_modulus(fn.on_rational, fn.modulus, k_max + 1)
    table: dict[int, int] = {}
    for k in range(k_max + 1):
        kp = modulus_from_code(code, k)
        if isinstance(kp, NeedFuel):
            raise RuntimeError(f"no cover found for {fn.name} at k={k}")
        table[k] = kp
    scale_bits = 20
    den = 1 << scale_bits
    tested = violations = 0
    per_k = samples // (k_max + 1)
    for k in range(k_max + 1):
        kp = table[k]
        reach = max(1, den >> kp) - 1  # |x - y| < 2^-kp on the 2^-20 grid
        for _ in range(per_k + (1 if k < samples % (k_max + 1) else 0)):
            a = rng.randint(0, den)
            b = min(den, max(0, a + rng.randint(-reach, reach)))
            x, y = Fraction(a, den), Fraction(b, den)
            tested += 1
            if abs(fn.exact(x) - fn.exact(y)) >= pow2(-k):
                violations += 1
    return table, tested, violations


def _heine(spec: ScenarioSpec, rep: RunReport) -> None:
    k_max = 6 if spec.k is None else spec.k
    samples = int(spec.extra.get("samples", 10_000))
    rng = random.Random(f"{spec.seed}:heine")
    rep.params.update(k_max=k_max, samples=samples)
    for fn in SUITE.values():
        table, tested, violations = heine_modulus_check(fn, k_max, samples, rng)
        shown = ", ".join(f"{k}->{v}" for k, v in table.items())
        rep.checks.append(check(f"modulus {fn.name}", violations == 0,
                                f"extracted {{{shown}}}; {tested} pairs, {violations} violations"))
    for fn in SUITE.values():
        code = code_from_modulus(fn.on_rational, fn.modulus, 4)
        worst, missing = Fraction(0), 0
        for k in range(5):
            for i in range(17):
                x = Fraction(i, 16)
                out = eval_code(code, real_from_rational(x), k)
                if not isinstance(out, Value):
                    missing += 1
                    continue
                worst = max(worst, abs(out.payload - fn.exact(x)) / pow2(-k + 1))
        rep.checks.append(check(f"code evaluation {fn.name}", missing == 0 and worst <= 1,
                                f"85 evaluations, worst error {float(worst):.3f} x 2^(1-k), "
                                f"{missing} without value"))


# weierstrass

def bernstein_grid_error(fn: SuiteFunction, n: int, depth: int = 10) -> tuple[int, Fraction]:
    p = bernstein_approx(fn.real, fn.modulus, n, DEGREE_CAP)
    den = 1 << depth
    err = max(abs(p.evaluate(Fraction(i, den)) - fn.exact(Fraction(i, den))) for i in range(den + 1))
    return p.degree, err


def _weierstrass(spec: ScenarioSpec, rep: RunReport) -> None:
    n = 3 if spec.k is None else spec.k
    depth = min(spec.depth, 10)
    rep.params.update(n=n, grid_depth=depth)
    for fn in SUITE.values():
        m, err = bernstein_grid_error(fn, n, depth)
        rep.checks.append(check(f"bernstein {fn.name}", err < pow2(-n),
                                f"degree {m}, max error on {(1 << depth) + 1} points "
                                f"{float(err):.6f} < 2^-{n}"))
    S = two_intervals()
    fn = SUITE["abs-half"]
    p = bernstein_approx(fn.real, fn.modulus, n)
    r = restrict_check(p, fn.real, S, n, 50)
    rep.checks.append(check("restriction to [0,1/3] u [2/3,1]", not r.violations and not r.uncertain,
                            f"{r.checked} set points, {len(r.violations)} violations, "
                            f"{len(r.uncertain)} uncertain"))


# one-point

def onepoint_threshold_check(k_max: int, samples: int, rng: random.Random) -> tuple[int, int, int]:
    """(points tested, violations, NeedFuel outcomes) of the threshold branch."""
    tested = violations = stuck = 0
    for k in range(k_max + 1):
        at0 = one_point_extend(SQUARE.real, one_point_threshold, real_from_rational(0), k)
        delta = one_point_threshold(k + 1)
        for _ in range(samples):
            x = delta * Fraction(rng.randint(1, 1 << 16), (1 << 16) + 1)
            out = one_point_extend(SQUARE.real, one_point_threshold, real_from_rational(x), k)
            tested += 1
            if not isinstance(out, Value) or not isinstance(at0, Value):
                stuck += 1
            elif abs(out.payload - at0.payload) >= pow2(-k + 1):
                violations += 1
    return tested, violations, stuck


def _onepoint(spec: ScenarioSpec, rep: RunReport) -> None:
    k_max = 8 if spec.k is None else spec.k
    rng = random.Random(f"{spec.seed}:onepoint")
    rep.params.update(k_max=k_max, function="x^2", threshold="2^-ceil(k/2)")
    at0 = one_point_extend(SQUARE.real, one_point_threshold, real_from_rational(0), k_max)
    rep.checks.append(check("value at 0", isinstance(at0, Value) and at0.payload == 0, str(at0)))
    half = one_point_extend(SQUARE.real, one_point_threshold, real_from_rational(Fraction(1, 2)), 6)
    ok = isinstance(half, Value) and abs(half.payload - Fraction(1, 4)) <= pow2(-6)
    rep.checks.append(check("value at 1/2, k=6", ok, str(half)))
    tested, violations, stuck = onepoint_threshold_check(k_max, 40, rng)
    rep.checks.append(check("threshold branch soundness", violations == 0 and stuck == 0,
                            f"{tested} points below the threshold, {violations} violations, "
                            f"{stuck} NeedFuel"))


# ekeland

def _potential(name: str | None, default: str):
    name = name or default
    if name not in POTENTIALS:
        raise ConfigError(f"unknown potential {name!r}; choose from {', '.join(POTENTIALS)}")
    return POTENTIALS[name]


def _ekeland_checks(rep: RunReport, res) -> None:
    c = res.certificate
    rep.checks.append(Check("minimizer", PASS,
                            f"prefix {format_finseq(res.prefix)} value {_frac(res.value_approx)} "
                            f"(depth {c.depth}, {c.evaluated} prefixes, precision {c.precision})"))
    rep.checks.append(check("minimality", c.minimal, "chosen approximant <= every evaluated one"))
    rep.checks.append(check("certificate inequality", c.inequality,
                            f"P(f*) <= P(g) + {_frac(c.epsilon)} for all {c.evaluated} g"))
    status = PASS if c.variational_uncertified == 0 else INCONCLUSIVE
    rep.checks.append(Check("variational inequality", status,
                            f"{c.variational_certified} certified, {c.variational_uncertified} "
                            f"not certified at this precision"))


def _ekeland_cantor(spec: ScenarioSpec, rep: RunReport) -> None:
    k = 3 if spec.k is None else spec.k
    P = _potential(spec.potential, "embed")
    rep.params.update(k=k, potential=P.name, fan_budget=spec.depth)
    _ekeland_checks(rep, ekeland_search(P, k, spec.depth))


def _ekeland_baire(spec: ScenarioSpec, rep: RunReport) -> None:
    k = 2 if spec.k is None else spec.k
    P = _potential(spec.potential, "inverse-power")
    B = 4 if spec.branching is None else spec.branching
    rep.params.update(k=k, potential=P.name, branching=B, fan_budget=spec.depth)
    try:
        res = ekeland_search_baire(P, B, k, spec.depth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _ekeland_checks(rep, res)


# ecf

EXISTS3_SHAPE = "ALL Y:2 . EX f:1 . Y(f) = 0"


def _ecf_demo(spec: ScenarioSpec, rep: RunReport) -> None:
    text = spec.formula or EXISTS3_SHAPE
    rep.params.update(formula=text)
    try:
        phi = parse_formula(text)
    except ParseError as exc:
        raise ConfigError(f"formula: {exc.message} at offset {exc.offset}") from None
    try:
        out = ecf_translate(phi)
    except ECFUnsupported as exc:
        rep.checks.append(Check("translate", FAIL, str(exc)))
        return
    rep.checks.append(Check("translate", PASS, show_formula(out)))
    d = max_quantifier_degree(out)
    rep.checks.append(check("no variable of degree >= 2", d <= 1, f"largest degree {d}"))
    rep.checks.append(check("idempotent", ecf_translate(out) == out, "translating twice changes nothing"))
    try:
        check_formula(out)
        rep.checks.append(Check("well typed", PASS, "output typechecks"))
    except TypeMismatch as exc:
        rep.checks.append(Check("well typed", FAIL, str(exc)))


# oracles

def grilliot_agreement(length: int, fuel: int) -> tuple[int, int]:
    """Compare the functional extracted from the step surrogate with
    exists2_search on every binary g of the given length (tail of ones)."""
    zero = real_from_rational(0)
    oracle = grilliot_extract(step_surrogate, zero, lambda n: real_from_rational(pow2(-n)), Fraction(1))
    disagreements = 0
    for bits in range(1 << length):
        g = BaireSeq.from_list([(bits >> (length - 1 - i)) & 1 for i in range(length)], tail=1)
        a, b = oracle(g, fuel), exists2_search(g, fuel)
        same = (isinstance(a, Found) and isinstance(b, Found) and a.witness == b.witness) or \
               (isinstance(a, ExhaustedAt) and isinstance(b, ExhaustedAt))
        disagreements += not same
    return 1 << length, disagreements


def _oracle_demo(spec: ScenarioSpec, rep: RunReport) -> None:
    length = min(spec.depth, 10)
    fuel = length
    rep.params.update(length=length, oracle_fuel=fuel)
    log: list = []
    out = mu_search(BaireSeq.from_list([1, 1, 0, 1]), 10, log)
    rep.checks.append(check("mu on (1,1,0,1,...)", out == Found(2),
                            f"{out}; probes: " + " | ".join(map(str, log))))
    out = exists2_search(BaireSeq.from_list([], tail=1), 8)
    rep.checks.append(check("exists2 on the constant 1", out == ExhaustedAt(8), str(out)))
    total, bad = grilliot_agreement(length, fuel)
    rep.checks.append(check("grilliot vs exists2", bad == 0,
                            f"{total} sequences of length {length}, {bad} disagreements"))
    out = suslin_depth_check(lambda s: 0 if all(v == i for i, v in enumerate(s)) else 1, 3)
    rep.checks.append(check("suslin depth check on the identity", str(out) ==
                            "SurvivesTo(depth=3, witness=(0, 1, 2))", str(out)))
    try:
        out = kappa0_search(lambda f: 1 - f(2), 3)
        rep.checks.append(check("kappa0 on 1 - f(2)", out == Found((0, 0, 1)), str(out)))
    except ModulusViolation as exc:
        rep.checks.append(Check("kappa0 on 1 - f(2)", FAIL, str(exc)))
    try:
        out = kappa0_search(lambda f: 1, 2)
        rep.checks.append(check("kappa0 on the constant 1", out == NoneAtDepth(2), str(out)))
    except ModulusViolation as exc:
        rep.checks.append(Check("kappa0 on the constant 1", FAIL, str(exc)))


_RUNNERS: dict[str, Callable[[ScenarioSpec, RunReport], None]] = {
    "tietze": _tietze,
    "heine": _heine,
    "weierstrass": _weierstrass,
    "onepoint": _onepoint,
    "ekeland-cantor": _ekeland_cantor,
    "ekeland-baire": _ekeland_baire,
    "ecf-demo": _ecf_demo,
    "oracle-demo": _oracle_demo,
}


def run_scenario(spec: ScenarioSpec) -> RunReport:
    if spec.name not in _RUNNERS:
        raise ConfigError(f"unknown scenario {spec.name!r}; choose from {', '.join(SCENARIOS)}")
    rep = RunReport(spec.name, {}, spec.seed, TRACE[spec.name])
    start = time.perf_counter()
    try:
        _RUNNERS[spec.name](spec, rep)
    except (WitnessInvalid, RuntimeError) as exc:
        rep.checks.append(Check("run", FAIL, f"{type(exc).__name__}: {exc}"))
    rep.elapsed_ms = (time.perf_counter() - start) * 1000
    return rep
