import json

import pytest

from rmcodes.cli import UsageError, eval_real_expr, main

DATA = "data"


@pytest.fixture(autouse=True)
def in_repo(monkeypatch, request):
    monkeypatch.chdir(request.config.rootpath)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_real_eval(capsys):
    code, out, _ = run(capsys, "real", "eval", "1/3 + abs(2/7 - 1/2)", "--precision", "4")
    assert code == 0 and "23/42" in out


def test_real_expr_rejects():
    with pytest.raises(UsageError):
        eval_real_expr("x + 1")
    with pytest.raises(UsageError):
        eval_real_expr("1/0")
    assert eval_real_expr("min(1/2, 1/3) * 3").approx(5) == 1


def test_real_check_and_hat(capsys, tmp_path):
    code, out, _ = run(capsys, "real", "check", f"{DATA}/third.real")
    assert code == 0 and "PASS" in out
    bad = tmp_path / "bad.real"
    bad.write_text("realcode k_max=2\n0 0\n1 1\n2 0\n")
    assert run(capsys, "real", "check", str(bad))[0] == 1
    raw = tmp_path / "raw.txt"
    raw.write_text("0\n1\n0\n1\n")
    code, out, _ = run(capsys, "real", "hat", str(raw))
    assert code == 0 and "3 0/1" in out


def test_global_flags_anywhere(capsys):
    a = run(capsys, "--precision", "3", "real", "eval", "1/3")[1]
    b = run(capsys, "real", "eval", "1/3", "--precision", "3")[1]
    strip = [ln for ln in a.splitlines() if not ln.startswith("elapsed")]
    assert strip == [ln for ln in b.splitlines() if not ln.startswith("elapsed")]
    assert "k_max=3" in a


def test_json_schema(capsys):
    code, out, _ = run(capsys, "--format", "json", "set", "member", f"{DATA}/two_intervals.set",
                       "--x", "1/3")
    data = json.loads(out)
    assert code == 0
    assert set(data) >= {"scenario", "params", "checks", "seed", "elapsed_ms"}
    assert data["checks"][0]["status"] == "pass"


def test_code_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "code", "build", "identity", "--k-max", "4")
    path = tmp_path / "id.code"
    path.write_text(out)
    code, out, _ = run(capsys, "code", "eval", str(path), "--x", "1/3", "--precision", "3")
    assert code == 0 and "certified at precision 3" in out
    code, out, _ = run(capsys, "code", "modulus", str(path), "--precision", "3")
    assert code == 0 and "omega(3)" in out
    code, out, _ = run(capsys, "code", "totality", str(path), "--precision", "2")
    assert "17/17" in out


def test_code_assoc(capsys):
    code, out, _ = run(capsys, "code", "assoc", f"{DATA}/parity.assoc", "--seq", "[3]")
    assert code == 0 and "1 certified" in out
    assert run(capsys, "code", "assoc", f"{DATA}/parity.assoc")[0] == 2


def test_set_queries(capsys):
    assert "gap" in run(capsys, "set", "gap", f"{DATA}/two_intervals.set", "--x", "1/2")[1]
    assert "dist" in run(capsys, "set", "dist", f"{DATA}/two_intervals.set", "--x", "1/2")[1]


def test_extend_lines(capsys):
    code, out, _ = run(capsys, "extend", "--set", f"{DATA}/two_intervals.set",
                       "--points", "0,1/2,1", "--precision", "4")
    assert code == 0
    assert out.splitlines() == ["0/1 0/1 4", "1/2 1/2 4", "1/1 1/1 4"]
    code, out, _ = run(capsys, "extend", "--points", "0,1/2", "--precision", "6")
    assert out.splitlines()[0] == "0/1 0/1 6"


def test_ekeland(capsys):
    code, out, _ = run(capsys, "ekeland", "embed", "--k", "3")
    assert code == 0 and "prefix [0,0,0,0,0]" in out
    assert run(capsys, "ekeland", "inverse-power", "--branching", "0")[0] == 2
    assert run(capsys, "ekeland", "nope")[0] == 2


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "mu", "--seq", "[1,1,0]")
    assert out.splitlines() == ["1 mu f(0) 1", "2 mu f(1) 1", "3 mu f(2) 0", "pass: Found(witness=2)"]
    code, out, _ = run(capsys, "--fuel", "4", "oracle", "exists2", "--seq", "[1]")
    assert code == 0 and out.splitlines()[-1] == "inconclusive: ExhaustedAt(budget=4)"
    assert "SurvivesTo" in run(capsys, "oracle", "suslin", "--seq", "[0,1,2]")[1]


def test_lang(capsys, monkeypatch):
    code, out, _ = run(capsys, "lang", "norm", f"{DATA}/terms.txt")
    assert code == 0 and out.splitlines()[:2] == ["7", "1"]
    code, out, _ = run(capsys, "lang", "ecf", f"{DATA}/formulas.txt", "--style", "paren")
    assert "(ALL a:1)(ALL f:1) EvalAssoc(a, f) = EvalAssoc(a, f)" in out
    code, out, _ = run(capsys, "lang", "qfac", f"{DATA}/formulas.txt")
    assert code == 1 and "EX Y:0->0 . ALL x:0 . x < Y(x)" in out


def test_lang_stdin_errors(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("x(\n"))
    code, _, err = run(capsys, "lang", "parse")
    assert code == 2 and "offset 2" in err
    monkeypatch.setattr("sys.stdin", io.StringIO("n:0 m:0\n"))
    code, out, _ = run(capsys, "lang", "check")
    assert code == 1 and "TypeMismatch" in out


def test_scenario_and_missing_file(capsys):
    code, out, _ = run(capsys, "scenario", "ekeland-cantor")
    assert code == 0 and "row:" in out
    code, _, err = run(capsys, "scenario", "tietze", "--set", "no/such.set")
    assert code == 2 and "no/such.set" in err


def test_accept_filters(capsys):
    code, out, err = run(capsys, "accept", "--filter", "nosuchtag")
    assert code == 0 and "warning" in err
    code, out, _ = run(capsys, "accept", "--filter", "ecf")
    assert code == 0 and out.startswith("PASS  9. System T / ECF")


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--fuel", "-1", "real", "eval", "1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
