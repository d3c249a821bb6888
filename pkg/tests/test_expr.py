import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracadams.errors import ExpressionSyntaxError, UnknownIdentifier
from fracadams.expr import parse_expression
from fracadams.problems import BUILTINS
from fracadams.solver import TimeGrid
from fracadams.uncertain import UncertainProblem, sweep


def test_examples():
    assert parse_expression("0.6*x")(0.0, 0.5) == pytest.approx(0.3, rel=1e-15)
    assert parse_expression("1.2*(0.05-x)+0.04*sqrt(x)")(0.0, 0.04) == pytest.approx(0.02, rel=1e-14)
    assert parse_expression("sqrt(x-1)+(1-t)")(1.0, 3.0) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_precedence_and_associativity():
    e = lambda s: parse_expression(s)(2.0, 3.0)  # noqa: E731
    assert e("2^3^2") == 512.0
    assert e("-x^2") == -9.0
    assert e("t*x-t/x") == pytest.approx(6.0 - 2.0 / 3.0)
    assert e("(t+x)*2") == 10.0
    assert e("exp(ln(x))+abs(-t)+cos(0)+sin(pi)") == pytest.approx(3.0 + 2.0 + 1.0, abs=1e-15)
    assert e("1.5e1+.5") == 15.5


def test_constant_folding():
    expr = parse_expression("2*(3+4)*x + sqrt(16)")
    assert expr.canonical() == "((14.0*x)+4.0)"
    assert parse_expression("a*x", {"a": 0.6}).canonical() == "(0.6*x)"


def test_errors_carry_positions():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("1+*x")
    assert info.value.pos == 2
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("sqrt(x")
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("x $ 2")
    with pytest.raises(UnknownIdentifier) as info:
        parse_expression("0.6*y")
    assert info.value.name == "y" and info.value.pos == 4
    with pytest.raises(UnknownIdentifier):
        parse_expression("foo(x)")


def test_domain_errors_are_deferred():
    expr = parse_expression("sqrt(x-1)")
    with pytest.raises(ValueError):
        expr(0.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), t=st.floats(0, 2), x=st.floats(-3, 3))
def test_matches_python_arithmetic(a, b, t, x):
    expr = parse_expression("a*x - b*t^2 + x*t", {"a": a, "b": b})
    assert expr(t, x) == pytest.approx(a * x - b * t**2 + x * t, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_round_trip(name):
    case = BUILTINS[name]()
    u = case.problem
    drift = parse_expression(parse_expression(case.drift_text).canonical())
    diffusion = parse_expression(parse_expression(case.diffusion_text).canonical())
    again = UncertainProblem(u.nu, drift, diffusion, u.x0, u.t_start, u.t_end, u.domain)
    grid = TimeGrid.uniform(0.0, 1.0, 0.02)
    alphas = [0.1, 0.5, 0.9]
    a = sweep(u, alphas, grid).values
    b = sweep(again, alphas, grid).values
    assert np.max(np.abs(a - b)) <= 1e-14
