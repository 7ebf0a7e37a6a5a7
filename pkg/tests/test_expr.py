import math

import pytest

from ctdde.expr import (Binary, Const, EvalError, ParseError, Piecewise, Unary, Var, evaluate,
                        evaluate_exact, NotRational, parse, to_text)


def test_parse_example1_delay_root_is_minus():
    e = parse("floor(t) - 0.5^floor(t) * (1 - frac(t))")
    assert isinstance(e, Binary) and e.op == "-"
    assert e.left == Unary("floor", Var())
    assert e.right.op == "*"


def test_parse_variable():
    assert parse("t") == Var()


def test_parse_three_branch_piecewise():
    e = parse("piecewise(frac(t) < 0.5 : t ; floor(t) <= 5 : t - 1 ; otherwise : t - 0.5)")
    assert isinstance(e, Piecewise)
    assert len(e.branches) == 2
    assert evaluate(e, 2.25) == 2.25
    assert evaluate(e, 2.75) == 1.75
    assert evaluate(e, 6.75) == 6.25


@pytest.mark.parametrize("text, value", [
    ("2^3^2", 2.0 ** 9),          # right associative
    ("-2^2", -4.0),               # ^ binds tighter than unary minus
    ("2*3+4", 10.0),
    ("2*(3+4)", 14.0),
    ("8/2/2", 2.0),
    ("2**3", 8.0),
    ("1e-3*1000", 1.0),
    ("abs(-3) + exp(0) + sin(0) + cos(0)", 5.0),
])
def test_precedence(text, value):
    assert evaluate(parse(text), 0.0) == pytest.approx(value)


def test_condition_connectives():
    e = parse("piecewise(t >= 1 and t < 2 : 1 ; t < 0 or t > 5 : 2 ; otherwise : 3)")
    assert [evaluate(e, t) for t in (1.5, -1, 6, 3)] == [1, 2, 2, 3]


@pytest.mark.parametrize("text, fragment", [
    ("t +", "position"),
    ("foo(t)", "unknown"),
    ("x + 1", "unknown"),
    ("piecewise(t < 1 : 2)", "otherwise"),
    ("(t", "')'"),
    ("", "empty"),
    ("t $ 2", "unexpected character"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert fragment in str(err.value)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse("t + * 2")
    assert err.value.pos == 4


def test_eval_examples():
    assert evaluate(parse("frac(t)"), 2.3) == pytest.approx(0.3)
    assert evaluate(parse("1/(2 + 0.5^(floor(t)-2))"), 2.0) == pytest.approx(1 / 3)
    assert evaluate(parse("floor(t)"), -0.5) == -1


def test_frac_is_in_unit_interval_for_negative_t():
    assert evaluate(parse("frac(t)"), -0.25) == 0.75


@pytest.mark.parametrize("text, t", [("1/(t-1)", 1.0), ("0^(-1)", 0.0), ("(-2)^0.5", 0.0),
                                     ("exp(t)", 1e6), ("(t-1)^(-2)", 1.0)])
def test_eval_errors(text, t):
    with pytest.raises(EvalError):
        evaluate(parse(text), t)


def test_zero_to_zero_is_one():
    assert evaluate(parse("t^0"), 0.0) == 1.0


def test_piecewise_boundary_is_exact():
    e = parse("piecewise(frac(t) < 0.5 : 1 ; otherwise : 2)")
    assert evaluate(e, 3.5) == 2
    assert evaluate(e, math.nextafter(3.5, 0)) == 1


def test_const_rejects_non_finite():
    with pytest.raises(ValueError):
        Const(float("nan"))


def test_print_reparse_keeps_negative_constants():
    e = Binary("-", Const(-2.5), Unary("neg", Var()))
    assert parse(to_text(e)) == e


def test_named_constants():
    assert evaluate(parse("sin(pi/2) + e"), 0.0) == pytest.approx(1 + math.e)


def test_exact_evaluation_is_rational():
    from fractions import Fraction
    x = parse("(1+0.5^floor(t))*(1-frac(t))")
    assert Fraction(evaluate_exact(x, Fraction(13, 4))) == Fraction(9, 8) * Fraction(3, 4)
    with pytest.raises(NotRational):
        evaluate_exact(parse("cos(t)"), 1)


def test_expression_is_callable_and_hashable():
    e = parse("2*t")
    assert e(1.5) == 3.0
    assert hash(e) == hash(parse("2*t"))


def test_negated_constant_node_survives_round_trip():
    e = Unary("neg", Const(2.0))
    assert parse(to_text(e)) == e
    assert parse("-2") == Const(-2.0)
    assert parse("-2^2") == Unary("neg", Binary("^", Const(2.0), Const(2.0)))
