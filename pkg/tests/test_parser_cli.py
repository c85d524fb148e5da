import json
from fractions import Fraction

import pytest
from hypothesis import given

from oracles import rand_qfunction, rand_scalar, rngs
from qkloc import (
    AlgebraContext,
    ConfigurationError,
    ExprSyntaxError,
    LoweringError,
    Monomial,
    PowerNotInteger,
    QFactor,
    QFunction,
    SessionConfig,
    TorusScalar,
    UnknownVariable,
    parse_expr,
    parse_value,
)
from qkloc.cli import main
from qkloc.serialize import qfunction_text, render, scalar_text

CTX = AlgebraContext(1, 2)


# -- parsing ----------------------------------------------------------------------

def test_monomial():
    assert parse_value("L0^2 * L1^-1", CTX) == Monomial(CTX, [2, -1])


def test_single_pole():
    f = parse_value("1/(1 - q*L0/L1)", CTX)
    assert isinstance(f, QFunction)
    assert f.den == (QFactor(1, Monomial(CTX, [1, -1])),)


def test_unclosed_parenthesis_reports_end_of_input():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("(1 - q", CTX)
    assert info.value.position == len("(1 - q")


@pytest.mark.parametrize("text, pos", [("1 +", 3), ("q ** 2", 3), ("1 $ 2", 2), (")", 0), ("L0^", 3)])
def test_syntax_error_positions(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text, CTX)
    assert info.value.position == pos


@pytest.mark.parametrize("text", ["x", "L2", "Lambda0", "qq"])
def test_unknown_variables(text):
    with pytest.raises(UnknownVariable):
        parse_expr(text, CTX)


@pytest.mark.parametrize("text", ["q^(1/2)", "L0^L1", "q^q"])
def test_non_integer_powers(text):
    with pytest.raises(PowerNotInteger):
        parse_expr(text, CTX)


def test_precedence():
    assert parse_value("1 + 2*3^2", CTX) == TorusScalar.const(CTX, 19)
    assert parse_value("-2^2", CTX) == TorusScalar.const(CTX, -4)
    assert parse_value("2/3/4", CTX) == TorusScalar.const(CTX, Fraction(1, 6))
    assert parse_value("1 - 2 - 3", CTX) == TorusScalar.const(CTX, -4)


def test_structural_division():
    f = parse_value("1/((1 - q)^2*(1 - q^2*L0)/(1 + L1))", CTX)
    g = parse_value("(1 + L1)*(1/(1 - q))^2/(1 - q^2*L0)", CTX)
    assert f == g
    assert parse_value("1/(1 + q)", CTX).den == (QFactor(1, Monomial.identity(CTX), 1, 1),)


def test_odd_root_order_plus_binomial_is_rationalized():
    ctx = AlgebraContext(1, 3)
    f = parse_value("1/(1 + q*L0)", ctx)
    assert f == parse_value("(1 - q*L0)/(1 - q^2*L0^2)", ctx)


def test_kind_checks():
    with pytest.raises(LoweringError):
        parse_value("1 - q", CTX, "scalar")
    with pytest.raises(LoweringError):
        parse_value("L0 + L1", CTX, "monomial")
    with pytest.raises(LoweringError):
        parse_value("1/(1 - 2*q)", CTX)
    with pytest.raises(LoweringError):
        parse_value("P*q", CTX)
    with pytest.raises(LoweringError):
        parse_value("1/P", CTX)


def test_session_config():
    assert SessionConfig(1, 4).m == 12
    with pytest.raises(ConfigurationError):
        SessionConfig(1, 3, 4)
    with pytest.raises(ConfigurationError):
        SessionConfig(0)


@given(rngs())
def test_print_parse_round_trip_qfunction(rng):
    ctx = AlgebraContext(rng.choice([1, 2]), rng.choice([1, 2]))
    f = rand_qfunction(rng, ctx, scalar_den=True)
    assert parse_value(qfunction_text(f), ctx, "qfunction") == f


@given(rngs())
def test_print_parse_round_trip_scalar(rng):
    ctx = AlgebraContext(2, 1)
    s = rand_scalar(rng, ctx)
    assert parse_value(scalar_text(s), ctx, "scalar") == s


# -- rendering ------------------------------------------------------------------------

def test_json_layout():
    f = parse_value("1/(1 - q*L0/L1)", CTX)
    data = json.loads(render(f, "json", {"n": 1, "d": 1, "m": 2}, [{"check": "x", "pass": True}]))
    assert set(data) == {"session", "result", "checks"}
    assert data["session"] == {"n": "1", "d": "1", "m": "2"}
    assert data["result"]["den"] == [{"a": "1", "mu": ["1/1", "-1/1"], "mult": "1"}]
    assert data["checks"] == [{"check": "x", "pass": True}]


def test_latex_uses_lambda_subscripts():
    f = parse_value("1/(1 - q*L0/L1)", CTX)
    assert render(f, "latex") == "\\frac{1}{(1-q\\Lambda_{0}\\Lambda_{1}^{-1})}"


def test_rendering_is_deterministic():
    f = parse_value("1/((1 - q^2)*(1 - q*L0/L1)*(1 - q^2*L0/L1))", CTX)
    assert render(f, "json") == render(parse_value(qfunction_text(f), CTX), "json")


# -- command line -----------------------------------------------------------------------

def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_j_component_json(capsys):
    code, out, _ = run(capsys, "j", "--n", "1", "--max-degree", "2", "--fixed-point", "0", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["session"] == {"n": "1", "d": "2", "m": "2"}
    assert data["result"]["truncation"] == "2"
    assert len(data["result"]["coeffs"]) == 3


def test_cli_verify_recursion(capsys):
    code, out, _ = run(capsys, "verify-recursion", "--n", "1", "--i", "0", "--j", "1", "--m", "2", "--max-degree", "3")
    assert code == 0 and "PASS" in out and "FAIL" not in out


def test_cli_c_coeff_both(capsys):
    code, out, _ = run(capsys, "c-coeff", "--n", "2", "--i", "0", "--j", "1", "--m", "2", "--method", "both",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert set(data["result"]) == {"product", "tangent"}
    assert data["checks"] == [{"check": "product == tangent", "pass": True}]


def test_cli_verification_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify-degree2", "--perturb", "3")
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["parse", "(1 - q"],
        ["parse", "L7"],
        ["c-coeff", "--i", "0", "--j", "0"],
        ["j", "--max-degree", "3", "--root-order", "4"],
        ["j", "--fixed-point", "5"],
        ["residue", "1/(1 - q)", "--mu", "L0"],
    ],
)
def test_cli_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["j-pform", "--n", "1", "--max-degree", "1"],
        ["partial-fractions", "1/((1 - q^2)*(1 - q*L0/L1)*(1 - q^2*L0/L1))", "--root-order", "2"],
        ["split-kpm", "q^2/(1 - q*L0/L1)"],
        ["residue", "1/(1 - q^2*L0/L1)", "--mu", "L0/L1", "--m", "2"],
        ["tangent-eigenvalues", "--n", "2", "--m", "2"],
        ["lefschetz", "--n", "2", "--k", "3", "--format", "latex"],
        ["reconstruct", "--n", "1", "--max-degree", "2"],
        ["parse", "L0^2 * L1^-1", "--format", "json"],
        ["verify-degree2"],
    ],
)
def test_cli_commands_succeed(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip()


def test_cli_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "lefschetz", "--k", "2", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["checks"][0]["pass"] is True


def test_cli_is_deterministic(capsys):
    argv = ["partial-fractions", "1/((1 - q)*(1 - q*L0/L1)*(1 + q*L1/L0))", "--format", "json", "--root-order", "2"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
