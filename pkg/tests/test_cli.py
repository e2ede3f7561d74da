import json

import pytest
from conftest import load_golden_series

from dgforms.cli import main
from dgforms.parsing import parse_rat
from dgforms.tseries import TSeries


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)


def test_expand_matches_golden(capsys):
    obj = run_json(capsys, "expand", "--q", "3", "--prec", "32", "Delta")
    assert TSeries.from_json_obj(obj) == load_golden_series("Delta")
    obj = run_json(capsys, "expand", "--q", "3", "--prec", "32", "h^2 g^2")
    assert TSeries.from_json_obj(obj) == load_golden_series("phi12")


def test_expand_text(capsys):
    code, out, _ = run(capsys, "expand", "--q", "3", "--prec", "2", "h")
    assert code == 0 and out == "t\n"
    code, out, _ = run(capsys, "expand", "--prec", "9", "Delta")
    assert out == "t^2 + 2*t^6 + (θ^3 + 2*θ)*t^8\n"
    code, out, _ = run(capsys, "expand", "--prec", "9", "--ascii", "Delta")
    assert out == "t^2 + 2*t^6 + (T^3 + 2*T)*t^8\n"


def test_global_flags_before_subcommand(capsys):
    a = run(capsys, "--q", "5", "--prec", "20", "expand", "Delta")
    b = run(capsys, "expand", "--q", "5", "--prec", "20", "Delta")
    assert a == b and a[0] == 0


def test_json_round_trip(capsys):
    obj = run_json(capsys, "expand", "--prec", "40", "h^2 g^7 - (θ^3+2θ) h^4 g^3")
    s = TSeries.from_json_obj(obj)
    assert s.to_json_obj() == obj
    assert (s.weight, s.type) == (22, 0)


def test_hecke(capsys):
    code, out, _ = run(capsys, "hecke", "--q", "3", "--prec", "60", "--prime", "0", "Delta")
    assert code == 0
    assert out.splitlines()[-1] == "certified precision: 21"
    assert out.startswith("θ^2*t^2 + 2*θ^2*t^6")
    obj = run_json(capsys, "hecke", "--prec", "60", "--prime", "1", "Delta")
    Td = TSeries.from_json_obj(obj)
    delta = TSeries.from_json_obj(run_json(capsys, "expand", "--prec", "60", "Delta"))
    assert Td == delta.truncate(Td.prec).scale(parse_rat("(θ+1)^2", 3))


def test_hecke_zero(capsys):
    code, out, _ = run(capsys, "hecke", "--prec", "30", "--k", "8", "Delta - h^2")
    assert code == 0 and out.splitlines()[0] == "0"


def test_eigen_check(capsys):
    code, out, _ = run(capsys, "eigen-check", "--prec", "60", "--eigen", "θ^2", "Delta")
    assert (code, out) == (0, "true (certified precision 21)\n")
    code, out, _ = run(capsys, "eigen-check", "Delta", "--prec", "60", "--N", "{0}")
    assert out.startswith("true")
    code, out, _ = run(capsys, "eigen-check", "--prec", "60", "--eigen", "θ^3", "Delta")
    assert code == 0 and out == "false at t^2: T f has θ^2, λ f has θ^3\n"
    obj = run_json(capsys, "eigen-check", "--prec", "60", "--eigen", "θ^3", "Delta")
    assert obj == {"ok": False, "prec": 21, "exponent": 2, "lhs": "T^2", "rhs": "T^3"}


def test_eigencoeff_vanish_universal(capsys):
    assert run(capsys, "eigencoeff", "--q", "3", "--nu", "{1}", "--N", "{1}", "--base", "1")[1] == "θ^3 + 2*θ\n"
    assert run(capsys, "vanish", "--q", "3", "--nu", "{2}", "--N", "{1}")[1] == "true\n"
    assert run(capsys, "vanish", "--q", "3", "--nu", "{1}", "--N", "{1}")[1] == "false\n"
    code, out, _ = run(capsys, "universal", "--q", "5", "--nu", "{1,0}", "--check")
    assert (code, out) == (0, "3*x1 + 3*x2 + 4*theta\nPASS\n")


def test_brace_expanded_multiset(capsys):
    # an unquoted {1,0} arrives from the shell as two words
    a = run(capsys, "universal", "--q", "5", "--nu", "1", "0")
    b = run(capsys, "universal", "--q", "5", "--nu", "{1,0}")
    assert a == b


def test_goss(capsys):
    assert run(capsys, "goss", "--n", "4")[1] == "X^4 + ((1)/(θ^3 + 2*θ))*X^2\n"
    assert run_json(capsys, "goss", "--n", "4") == {"n": 4, "terms": [[2, "(1)/(T^3 + 2*T)"], [4, "1"]]}


def test_search(capsys):
    found = run_json(capsys, "search", "--q", "3", "--k", "12", "--m", "0", "--N", "{1}", "--prec", "120")
    assert len(found) == 1
    assert TSeries.from_json_obj(found[0]).truncate(32) == load_golden_series("phi12")
    found = run_json(capsys, "search", "--q", "3", "--k", "20", "--m", "0", "--N", "{1}", "--prec", "120")
    assert len(found) == 1
    assert TSeries.from_json_obj(found[0]).truncate(32) == load_golden_series("phi20")
    code, out, _ = run(capsys, "search", "--q", "3", "--k", "12", "--m", "0", "--N", "{2}", "--prec", "120")
    assert (code, out) == (0, "")


@pytest.mark.parametrize(
    "argv,code,msg",
    [
        (["expand", "h +"], 2, "position 3"),
        (["expand", "h^2 + k"], 2, "position 6"),
        (["expand", "--prec", "1", "h"], 2, "--prec"),
        (["eigencoeff", "--nu", "{1,-1}", "--N", "{1,1}"], 2, ""),
        (["expand", "--q", "4", "h"], 3, "prime"),
        (["expand", "h + g"], 3, "graded inconsistency"),
        (["eigencoeff", "--nu", "{1}", "--N", "{1,0}"], 3, "length mismatch"),
        (["universal", "--nu", "{0,0,0}"], 3, "factorial vanishes"),
        (["hecke", "--prime", "0", "--k", "6", "Delta"], 3, "weight mismatch"),
        (["search", "--k", "20", "--N", "{1}", "--prec", "6"], 4, "insufficient precision"),
    ],
)
def test_exit_codes(capsys, argv, code, msg):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert msg in err
    assert out == ""


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_output_is_deterministic(capsys):
    a = run(capsys, "expand", "--prec", "50", "--threads", "1", "phi22")
    b = run(capsys, "expand", "--prec", "50", "--threads", "4", "phi22")
    assert a == b
