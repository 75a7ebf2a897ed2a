"""Command-line entry point.

Exit status: 0 when every check passed (inconclusive is not a failure),
1 when a check failed, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import ast
import operator
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .acceptance import report_lines, run_acceptance
from .builtins import FUNCTIONS, POTENTIALS, one_point_threshold
from .codes import (Modulus, code_from_modulus, dump_nbhd_code, eval_assoc,
                    eval_code, load_associate, load_nbhd_code, modulus_from_code, totality_report)
from .extensions import (InconsistentModulus, PartialFnOnSet, ekeland_search, ekeland_search_baire,
                         one_point_extend, tietze_extend)
from .lang import (BudgetExceeded, ParseError, TypeMismatch, check_formula, ecf_translate,
                   normalize, parse_formula, parse_term, qfac_skolemize, show_formula, show_term,
                   typecheck)
from .lang.passes import ECFUnsupported, ShapeMismatch
from .oracles import (ExhaustedAt, Fuel, ModulusViolation, exists2_search, kappa0_search, mu_search,
                      suslin_depth_check)
from .outcomes import Inconsistent, NeedFuel, Value
from .reals import (RealCode, abs_, format_rational, format_snapshot, hat_normalize,
                    is_fast_cauchy_upto, parse_rational, parse_snapshot_table, real_from_rational, rmax,
                    rmin)
from .report import FAIL, INCONCLUSIVE, PASS, Check, RunReport
from .scenarios import SCENARIOS, ConfigError, ScenarioSpec, run_scenario
from .sepclosed import (EmptyEnumeration, GapInterval, WitnessedUpTo, complement_gap, dist_bounds,
                        load_set, member_search)
from .sequences import BaireSeq, format_finseq, parse_finseq

DEFAULTS = {"fuel": 100_000, "depth": 16, "precision": 8, "seed": 0, "format": "text"}


class UsageError(Exception):
    pass


def _fmt(q: Fraction) -> str:
    return format_rational(Fraction(q))


# real expressions: rationals combined with + - * abs min max

_BINOPS: dict[type, Callable[[RealCode, RealCode], RealCode]] = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
}
_CALLS = {"abs": 1, "min": 2, "max": 2}


def eval_real_expr(text: str) -> RealCode:
    """Evaluate e.g. ``1/3 + abs(2/7 - 1/2) * 3`` as a real.

    Quotients must have integer literals on both sides; they denote exact
    rationals, not real division.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"expression: {exc.msg} at offset {max(0, (exc.offset or 1) - 1)}") from None

    def go(node: ast.AST) -> RealCode:
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return real_from_rational(node.value)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
            num, den = _int_literal(node.left), _int_literal(node.right)
            if num is None or den is None or den == 0:
                raise UsageError(f"expression: '/' only forms rationals p/q (offset {node.col_offset})")
            return real_from_rational(Fraction(num, den))
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](go(node.left), go(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = go(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _CALLS:
            if len(node.args) != _CALLS[node.func.id] or node.keywords:
                raise UsageError(f"expression: wrong arguments to {node.func.id} (offset {node.col_offset})")
            args = [go(a) for a in node.args]
            return {"abs": lambda: abs_(args[0]), "min": lambda: rmin(*args),
                    "max": lambda: rmax(*args)}[node.func.id]()
        raise UsageError(f"expression: unsupported syntax at offset {getattr(node, 'col_offset', 0)}")

    return go(tree.body)


def _int_literal(node: ast.AST) -> int | None:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        v = _int_literal(node.operand)
        return None if v is None else -v
    return None


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(loader, path: str):
    try:
        return loader(_read(path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _outcome(out) -> tuple[str, str]:
    if isinstance(out, Value):
        payload = out.payload
        shown = _fmt(payload) if isinstance(payload, Fraction) else str(payload)
        return PASS, f"{shown} certified at precision {out.precision}"
    if isinstance(out, NeedFuel):
        return INCONCLUSIVE, f"NeedFuel({out.consumed})"
    if isinstance(out, Inconsistent):
        return FAIL, f"Inconsistent{out.witness}"
    return PASS, str(out)


# subcommands; each returns a RunReport

def cmd_real(a: argparse.Namespace, rep: RunReport) -> None:
    k = a.precision
    if a.action == "eval":
        x = eval_real_expr(a.target)
        rep.params.update(expression=a.target, k_max=k)
        rep.checks.append(Check("approximants", PASS, format_snapshot(x, k).strip().replace("\n", "; ")))
        ok = is_fast_cauchy_upto(x.approx, k)
        rep.checks.append(Check("fast-Cauchy", PASS if ok else FAIL, f"all pairs up to index {k}"))
        return
    text = _read(a.target)
    if a.action == "check":
        table = _load(parse_snapshot_table, a.target)
        bound = len(table) - 1
        ok = is_fast_cauchy_upto(table.__getitem__, bound)
        rep.params.update(file=a.target, k_max=bound)
        rep.checks.append(Check("fast-Cauchy", PASS if ok else FAIL, f"all pairs up to index {bound}"))
        return
    # hat: one rational per line, normalized
    try:
        raw = [parse_rational(ln) for ln in text.split() if ln]
    except ValueError as exc:
        raise ConfigError(f"{a.target}: {exc}") from None
    if not raw:
        raise ConfigError(f"{a.target}: no approximants")
    x = hat_normalize(raw)
    rep.params.update(file=a.target, k_max=len(raw) - 1)
    rep.checks.append(Check("normalized", PASS,
                            format_snapshot(x, len(raw) - 1).strip().replace("\n", "; ")))


def cmd_code(a: argparse.Namespace, rep: RunReport) -> None:
    k, fuel = a.precision, a.fuel
    if a.action == "build":
        fn = _builtin_function(a.target)
        code = code_from_modulus(fn.on_rational, fn.modulus, a.k_max)
        rep.params.update(function=fn.name, k_max=a.k_max, modulus=repr(fn.modulus))
        rep.checks.append(Check("quadruples", PASS, f"{len(code)} emitted"))
        rep.output = dump_nbhd_code(code)
        return
    if a.action == "assoc":
        alpha = _load(load_associate, a.target)
        if a.seq is None:
            raise UsageError("code assoc needs --seq")
        try:
            seq = parse_finseq(a.seq)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        f = BaireSeq.from_list(list(seq), tail=a.tail)
        bad = alpha.violations()
        rep.params.update(file=a.target, seq=format_finseq(seq), tail=a.tail, fuel=fuel)
        rep.checks.append(Check("branch consistency", PASS if not bad else FAIL,
                                f"{len(bad)} violating pairs"))
        status, details = _outcome(eval_assoc(alpha, f, fuel))
        rep.checks.append(Check("eval", status, details))
        return
    code = _load(load_nbhd_code, a.target)
    rep.params.update(file=a.target, k=k, fuel=fuel)
    if a.action == "eval":
        if a.x is None:
            raise UsageError("code eval needs --x")
        x = _rational(a.x)
        rep.params["x"] = _fmt(x)
        status, details = _outcome(eval_code(code, real_from_rational(x), k, fuel))
        rep.checks.append(Check("eval", status, details))
    elif a.action == "modulus":
        out = modulus_from_code(code, k, fuel)
        if isinstance(out, NeedFuel):
            rep.checks.append(Check("modulus", INCONCLUSIVE,
                                    f"no cover of [0,1] by the {out.consumed} quadruples with slack "
                                    f"<= 2^-{k + 1}"))
        else:
            rep.checks.append(Check("modulus", PASS, f"omega({k}) = {out}"))
    else:
        r = totality_report(code, k, a.grid, fuel)
        rep.params["grid_depth"] = a.grid
        shown = ", ".join(_fmt(q) for q in r.uncovered[:16])
        rep.checks.append(Check("totality", PASS if r.covered == r.total else INCONCLUSIVE,
                                f"{r.covered}/{r.total} grid points covered"
                                + (f"; uncovered: {shown}" if r.uncovered else "")))


def cmd_set(a: argparse.Namespace, rep: RunReport) -> None:
    S = _load(load_set, a.file)
    x = real_from_rational(_rational(a.x))
    k, fuel = a.precision, a.fuel
    rep.params.update(file=a.file, x=a.x, k=k, fuel=fuel, exhaustive=S.exhaustive)
    if a.action == "member":
        out = member_search(x, S, k, fuel)
        if isinstance(out, WitnessedUpTo):
            rep.checks.append(Check("member", PASS, f"witnessed up to {out.K}: indices {list(out.witnesses)}"))
        else:
            rep.checks.append(Check("member", INCONCLUSIVE, f"no witness at level {out.k} within fuel {out.fuel}"))
    elif a.action == "dist":
        try:
            lo, hi = dist_bounds(x, S, fuel, k)
        except EmptyEnumeration as exc:
            rep.checks.append(Check("dist", INCONCLUSIVE, str(exc)))
            return
        rep.checks.append(Check("dist", PASS, f"[{_fmt(lo)}, {_fmt(hi)}]"))
    else:
        out = complement_gap(x, S, k, fuel)
        if isinstance(out, GapInterval):
            rep.checks.append(Check("gap", PASS, f"({_fmt(out.c)}, {_fmt(out.d)}) between points "
                                                 f"{out.left} and {out.right}"))
        else:
            rep.checks.append(Check("gap", INCONCLUSIVE, f"point {out.near} too close to separate"))


def _builtin_function(name: str):
    if name not in FUNCTIONS:
        raise UsageError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    return FUNCTIONS[name]


def cmd_extend(a: argparse.Namespace, rep: RunReport) -> None:
    k, fuel = a.precision, a.fuel
    points = [_rational(p) for p in a.points.split(",")] if a.points else \
        [Fraction(i, 8) for i in range(9)]
    lines = []
    if a.set is None:
        rep.params.update(mode="one-point", function="x^2", k=k)
        for q in points:
            out = one_point_extend(FUNCTIONS["square"].real, one_point_threshold, real_from_rational(q), k)
            status, details = _outcome(out)
            rep.checks.append(Check(f"x={_fmt(q)}", status, details))
            if isinstance(out, Value):
                lines.append(f"{_fmt(q)} {_fmt(out.payload)} {out.precision}")
    else:
        S = _load(load_set, a.set)
        fn = _builtin_function(a.function)
        omega = Modulus.constant(a.modulus) if a.modulus is not None else fn.modulus
        f = PartialFnOnSet(fn.real, S, omega)
        rep.params.update(mode="tietze", set=a.set, function=fn.name, modulus=repr(omega), k=k, fuel=fuel)
        for q in points:
            try:
                out = tietze_extend(f, real_from_rational(q), k, fuel)
            except InconsistentModulus as exc:
                rep.checks.append(Check(f"x={_fmt(q)}", FAIL, f"InconsistentModulus: {exc}"))
                continue
            status, details = _outcome(out)
            rep.checks.append(Check(f"x={_fmt(q)}", status, details))
            if isinstance(out, Value):
                lines.append(f"{_fmt(q)} {_fmt(out.payload)} {out.precision}")
    rep.output = "\n".join(lines) + "\n"


def cmd_ekeland(a: argparse.Namespace, rep: RunReport) -> None:
    if a.potential not in POTENTIALS:
        raise UsageError(f"unknown potential {a.potential!r}; choose from {', '.join(POTENTIALS)}")
    P = POTENTIALS[a.potential]
    k = a.k if a.k is not None else 3
    rep.params.update(potential=P.name, k=k, branching=a.branching, fan_budget=a.depth)
    if a.branching is None:
        res = ekeland_search(P, k, a.depth)
    else:
        try:
            res = ekeland_search_baire(P, a.branching, k, a.depth)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    c = res.certificate
    rep.checks.append(Check("minimizer", PASS, f"prefix {format_finseq(res.prefix)} value "
                                               f"{_fmt(res.value_approx)} ({c.evaluated} prefixes, depth {c.depth})"))
    rep.checks.append(Check("certificate", PASS if c.minimal and c.inequality else FAIL,
                            f"P(f*) <= P(g) + {_fmt(c.epsilon)} for every evaluated g"))
    rep.checks.append(Check("variational inequality", PASS if not c.variational_uncertified else INCONCLUSIVE,
                            f"{c.variational_certified} certified, {c.variational_uncertified} not certified"))


def cmd_oracle(a: argparse.Namespace, rep: RunReport) -> None:
    fuel = a.fuel
    try:
        seq = parse_finseq(a.seq) if a.seq else ()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep.params.update(search=a.search, seq=format_finseq(seq), tail=a.tail, fuel=fuel)
    log: list = []
    if a.search in ("mu", "exists2"):
        g = BaireSeq.from_list(list(seq), tail=a.tail)
        search = mu_search if a.search == "mu" else exists2_search
        out = search(g, Fuel(fuel), log)
    elif a.search == "suslin":
        # accept exactly the prefixes of the given sequence
        depth = a.depth

        def f(sigma):
            return 0 if all(i < len(seq) and v == seq[i] for i, v in enumerate(sigma)) else 1
        out = suslin_depth_check(f, min(depth, len(seq)))
    else:
        # kappa0: Y(f) = 0 iff f starts with the given prefix
        m = len(seq)
        try:
            out = kappa0_search(lambda f: 0 if all(f(i) == v for i, v in enumerate(seq)) else 1, m)
        except ModulusViolation as exc:
            rep.checks.append(Check(a.search, FAIL, str(exc)))
            return
    status = INCONCLUSIVE if isinstance(out, ExhaustedAt) else PASS
    rep.checks.append(Check(a.search, status, str(out)))
    rep.output = "".join(f"{p}\n" for p in log) + f"{status}: {out}\n"


def cmd_lang(a: argparse.Namespace, rep: RunReport) -> None:
    text = _read(a.file)
    rep.params.update(action=a.action, file=a.file or "-")
    out_lines = []
    items = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    for lineno, line in items:
        name = f"line {lineno}"
        try:
            out_lines.append(_lang_one(a.action, line, a.budget, a.style))
            rep.checks.append(Check(name, PASS, out_lines[-1]))
        except ParseError as exc:
            raise ConfigError(f"line {lineno}, offset {exc.offset}: {exc.message}") from None
        except (TypeMismatch, ECFUnsupported, ShapeMismatch) as exc:
            rep.checks.append(Check(name, FAIL, f"{type(exc).__name__}: {exc}"))
            out_lines.append(f"error: {type(exc).__name__}: {exc}")
        except BudgetExceeded as exc:
            rep.checks.append(Check(name, INCONCLUSIVE, str(exc)))
            out_lines.append(f"inconclusive: {exc}")
    rep.output = "".join(ln + "\n" for ln in out_lines)


def _parse_any(line: str):
    try:
        return parse_formula(line), True
    except ParseError as formula_error:
        try:
            return parse_term(line), False
        except ParseError:
            raise formula_error from None


def _lang_one(action: str, line: str, budget: int, style: str) -> str:
    if action == "parse":
        node, is_formula = _parse_any(line)
        return show_formula(node, style) if is_formula else show_term(node)
    if action == "check":
        node, is_formula = _parse_any(line)
        if is_formula:
            env = check_formula(node)
            free = ", ".join(f"{k}:{v}" for k, v in env.items())
            return "formula ok" + (f"; free {free}" if free else "")
        return f"{show_term(node)} : {typecheck(node)}"
    if action == "norm":
        t = parse_term(line)
        typecheck(t)
        return show_term(normalize(t, budget))
    phi = parse_formula(line)
    out = ecf_translate(phi) if action == "ecf" else qfac_skolemize(phi)
    return show_formula(out, style)


def cmd_scenario(a: argparse.Namespace, rep: RunReport) -> RunReport:
    spec = ScenarioSpec(a.name, k=a.k, fuel=a.fuel, depth=a.depth, seed=a.seed,
                        set_file=a.set, function=a.function, formula=a.formula,
                        potential=a.potential, branching=a.branching)
    return run_scenario(spec)


def cmd_accept(a: argparse.Namespace, rep: RunReport) -> RunReport:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = run_acceptance(a.filter, a.seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return out


# argument parsing

def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda key: argparse.SUPPRESS) if suppress else DEFAULTS.get
    p.add_argument("--fuel", type=_natural, default=d("fuel"), help="search budget (default 100000)")
    p.add_argument("--depth", type=_natural, default=d("depth"), help="fan/grid depth budget (default 16)")
    p.add_argument("--precision", type=_natural, default=d("precision"), help="precision k (default 8)")
    p.add_argument("--seed", type=int, default=d("seed"), help="seed for sampled checks (default 0)")
    p.add_argument("--format", choices=("text", "json"), default=d("format"), help="report format")


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmcodes", description=(
        "Exact reals, codes for continuous functions, and desk-scale searches."))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("real", parents=[common], help="evaluate or check real codes")
    p.add_argument("action", choices=("eval", "check", "hat"))
    p.add_argument("target", help="expression (eval) or file ('-' for stdin)")
    p.set_defaults(run=cmd_real)

    p = sub.add_parser("code", parents=[common], help="neighbourhood codes and associates")
    p.add_argument("action", choices=("eval", "modulus", "totality", "assoc", "build"))
    p.add_argument("target", help="code file, or a builtin function name for build")
    p.add_argument("--x", help="point for eval (p/q)")
    p.add_argument("--seq", help="finite sequence for assoc, e.g. [0,1]")
    p.add_argument("--tail", type=_natural, default=0, help="value repeated after --seq")
    p.add_argument("--grid", type=_natural, default=4, help="grid depth for totality")
    p.add_argument("--k-max", type=_natural, default=4, help="levels emitted by build")
    p.set_defaults(run=cmd_code)

    p = sub.add_parser("set", parents=[common], help="separably closed set queries")
    p.add_argument("action", choices=("member", "dist", "gap"))
    p.add_argument("file")
    p.add_argument("--x", required=True, help="query point (p/q)")
    p.set_defaults(run=cmd_set)

    p = sub.add_parser("extend", parents=[common], help="Tietze or one-point extension values")
    p.add_argument("--set", help="set file; without it the one-point extension of x^2 is used")
    p.add_argument("--function", default="step", help="builtin function on the set")
    p.add_argument("--modulus", type=_natural, help="constant modulus on the set (default: the function's)")
    p.add_argument("--points", help="comma-separated p/q points (default: eighths)")
    p.set_defaults(run=cmd_extend)

    p = sub.add_parser("ekeland", parents=[common], help="epsilon-minimizer search")
    p.add_argument("potential", help=f"one of {', '.join(POTENTIALS)}")
    p.add_argument("--k", type=_natural)
    p.add_argument("--branching", type=int, help="branching bound for Baire space")
    p.set_defaults(run=cmd_ekeland)

    p = sub.add_parser("oracle", parents=[common], help="fuel-bounded searches with probe logs")
    p.add_argument("search", choices=("mu", "exists2", "suslin", "kappa0"))
    p.add_argument("--seq", help="finite sequence, e.g. [1,1,0]")
    p.add_argument("--tail", type=_natural, default=1, help="value repeated after --seq")
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("lang", parents=[common], help="parse, check, normalize, translate")
    p.add_argument("action", choices=("parse", "check", "norm", "ecf", "qfac"))
    p.add_argument("file", nargs="?", help="input file, one item per line (default stdin)")
    p.add_argument("--budget", type=_natural, default=100_000, help="reduction steps for norm")
    p.add_argument("--style", choices=("dot", "paren"), default="dot", help="quantifier notation")
    p.set_defaults(run=cmd_lang)

    p = sub.add_parser("scenario", parents=[common], help="run a scenario end to end")
    p.add_argument("name", choices=SCENARIOS)
    p.add_argument("--k", type=_natural, help="precision or level (scenario default if omitted)")
    p.add_argument("--set", help="set file (tietze)")
    p.add_argument("--function", help="builtin function (tietze)")
    p.add_argument("--formula", help="formula text (ecf-demo)")
    p.add_argument("--potential", help="potential name (ekeland-*)")
    p.add_argument("--branching", type=int, help="branching bound (ekeland-baire)")
    p.set_defaults(run=cmd_scenario)

    p = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    p.add_argument("--filter", help="criterion number or tag, e.g. 3 or bernstein")
    p.set_defaults(run=cmd_accept)
    return parser


def _render(rep: RunReport, fmt: str, command: str) -> str:
    if fmt == "json":
        return rep.to_json() + "\n"
    if command == "accept":
        return "\n".join(report_lines(rep) + [f"elapsed_ms: {rep.elapsed_ms:.1f}"]) + "\n"
    if rep.output is not None:
        return rep.output
    return rep.to_text()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    rep = RunReport(a.command, {}, a.seed)
    t0 = time.perf_counter()
    try:
        result = a.run(a, rep)
    except (UsageError, ConfigError) as exc:
        print(f"rmcodes {a.command}: error: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, RunReport):
        rep = result
    else:
        rep.elapsed_ms = (time.perf_counter() - t0) * 1000
    sys.stdout.write(_render(rep, a.format, a.command))
    if a.format == "text" and rep.output is not None and rep.failed and a.command != "lang":
        for c in rep.checks:
            if c.status == FAIL:
                print(f"{c.name}: {c.details}", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
