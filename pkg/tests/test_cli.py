from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

from monodromic.cli import (InputError, ParseError, SCHEMA, emit_report, parse_expr, parse_input, parse_program,
                            pretty, pretty_expr, run)
from monodromic.cli.main import main
from monodromic.cli.syntax import Assign, BinOp, Call, Neg, Num, Param, Pow, Sweep, Var, Weights

TOY = "dx = -y + l*x; dy = x + l*y; param l = {};"
SEPTIC = "dx = x*y^2 - y^3 + a*x^5; dy = 2*x^7 - x^4*y + 4*x*y^2 + y^3; param a = {};"


def _write(tmp_path, text, name="in.mono"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- syntax ---------------------------------------------------------------

def test_parse_statements():
    prog = parse_program("# a comment\ndx = -y; dy = x^3; V = rho;\nparam n = -3/4; weights = (1,3);\n"
                         "sweep n from 0 to 1 steps 5;")
    kinds = [type(s) for s in prog.statements]
    assert kinds == [Assign, Assign, Assign, Param, Weights, Sweep]
    assert prog.statements[3].value == F(-3, 4)
    assert prog.statements[4] == Weights(1, 3)
    assert prog.statements[5] == Sweep("n", F(0), F(1), 5)


def test_parse_expression_shape():
    e = parse_expr("-x^2 + 3*cos(2*phi)")
    assert e == BinOp("+", Neg(Pow(Var("x"), 2)), BinOp("*", Num(3), Call("cos", BinOp("*", Num(2), Var("phi")))))


def test_negative_exponent():
    assert parse_expr("rho^-1") == Pow(Var("rho"), -1)


def test_error_location():
    with pytest.raises(ParseError) as exc:
        parse_program("dx = -y +;")
    assert (exc.value.line, exc.value.col) == (1, 10)


@pytest.mark.parametrize("text", ["dx = ;", "dx = x^y;", "param a = x;", "dx = (x;", "weights = (1,);", "dx = x $ y;"])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_pretty_round_trip():
    src = "dx = -y + l*x; dy = x - (y - x)^2; V = rho*(1 - cos(2*phi)) + rho^-1; param l = 1/3;"
    prog = parse_program(src)
    assert parse_program(pretty(prog)) == prog
    assert pretty_expr(parse_expr("a - (b - c)")) == "a - (b - c)"
    assert pretty_expr(parse_expr("-(a + b)")) == "-(a + b)"


# --- problem --------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "dx = -y;",                                 # missing dy
    "dx = -y + k*x; dy = x;",                   # unbound parameter
    "dx = -y; dy = x; dx = y;",                 # duplicate target
    "dx = -y/x; dy = x;",                       # division by a polynomial
    "dx = -y; dy = x; sweep a from 0 to 1 steps 2; sweep b from 0 to 1 steps 2;",
    "dx = -y + a*x; dy = x; param a = 1; sweep a from 0 to 1 steps 2;",
])
def test_input_errors(text):
    with pytest.raises((InputError, ParseError)):
        parse_input(text)


def test_sweep_values():
    spec = parse_input("dx = -y + a*x; dy = x; sweep a from -1 to 1 steps 5;")
    assert spec.sweep.values() == [F(-1), F(-1, 2), F(0), F(1, 2), F(1)]
    assert parse_input("dx = -y; dy = x; sweep a from 0 to 1 steps 1;").sweep.values() == [F(0)]
    assert parse_input("dx = -y; dy = x; sweep a from 0 to 1 steps 0;").sweep.values() == []


# --- reports --------------------------------------------------------------

def test_center_json():
    rep = run(parse_input(TOY.format(0), max_order=3), jobs=1)
    data = json.loads(emit_report(rep, "json"))
    assert data["schema"] == SCHEMA
    assert data["verdict"] == "center"
    assert data["samples"][0]["error"] is None


def test_focus_json():
    rep = run(parse_input(TOY.format("1/10"), max_order=3, oracle=False), jobs=1)
    data = json.loads(emit_report(rep, "json"))
    assert data["verdict"] == "focus"
    assert data["samples"][0]["oracle"] is None


def test_empty_sweep_is_valid_json():
    rep = run(parse_input("dx = -y; dy = x; sweep a from 0 to 1 steps 0;"), jobs=1)
    data = json.loads(emit_report(rep, "json"))
    assert data["samples"] == [] and data["brackets"] == []


def test_poisoned_sample_is_isolated():
    # c = 1 moves the equilibrium off the origin; the other samples must still be analysed
    spec = parse_input("dx = -y + c; dy = x; sweep c from -1 to 1 steps 3;", max_order=2, oracle=False)
    data = json.loads(emit_report(run(spec, jobs=1), "json"))
    errors = [s["error"] for s in data["samples"]]
    assert errors[0] and errors[2] and errors[1] is None
    assert data["samples"][1]["verdict"] == "center"


def test_jobs_do_not_change_output():
    text = "dx = -y + l*x; dy = x + l*y; sweep l from -1/10 to 1/10 steps 3;"
    a = emit_report(run(parse_input(text, max_order=2), jobs=1), "json")
    b = emit_report(run(parse_input(text, max_order=2), jobs=3), "json")
    assert a == b


def test_sweep_bracket():
    text = "dx = -y + l*x; dy = x + l*y; sweep l from -1/10 to 1/5 steps 2;"
    data = json.loads(emit_report(run(parse_input(text, max_order=2), jobs=1), "json"))
    br = [b for b in data["brackets"] if b["quantity"] == "log_eta1"]
    assert len(br) == 1 and br[0]["between"] == ["-1/10", "1/5"]
    assert abs(br[0]["estimate"]) < 1e-4


def test_text_report():
    out = emit_report(run(parse_input(TOY.format(0), max_order=2), jobs=1), "text").decode()
    assert "Center" in out or "center" in out


# --- entry point ----------------------------------------------------------

def test_main_ok(tmp_path, capsys):
    assert main(["analyze", _write(tmp_path, TOY.format(0)), "--max-order", "2", "--no-oracle"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "center"


def test_main_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", _write(tmp_path, TOY.format(0)), "--max-order", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["schema"] == SCHEMA


def test_main_parse_error(tmp_path, capsys):
    assert main(["analyze", _write(tmp_path, "dx = -y +;")]) == 2
    assert "1:10" in capsys.readouterr().err


def test_main_missing_file(tmp_path):
    assert main(["analyze", str(tmp_path / "nope.mono")]) == 2


def test_main_numeric_failure(tmp_path):
    assert main(["analyze", _write(tmp_path, "dx = -y + 1; dy = x;"), "--no-oracle"]) == 3


def test_main_septic_focus(tmp_path, capsys):
    assert main(["analyze", _write(tmp_path, SEPTIC.format("0")), "--max-order", "4", "--no-oracle"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "focus" and data["obstruction"]["index"] == 3


def test_closed_form_input():
    spec = parse_input("dx = -y + l*x; dy = x + l*y; V = rho; param l = 1/10;", max_order=2, oracle=False)
    data = json.loads(emit_report(run(spec, jobs=1), "json"))
    cf = data["samples"][0]["closed_form"]
    assert data["samples"][0]["error"] is None and cf["verified"] and cf["m"] == 1
    assert abs(cf["g"] - 0.2 * 3.141592653589793) < 1e-9
    assert data["verdict"] == "focus"


def test_wrong_closed_form_is_flagged():
    spec = parse_input("dx = -y + l*x; dy = x + l*y; V = rho^2; param l = 1/10;", max_order=2, oracle=False)
    data = json.loads(emit_report(run(spec, jobs=1), "json"))
    assert data["samples"][0]["closed_form"]["verified"] is False
