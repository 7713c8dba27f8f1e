import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp

from schwartz_comp.expr import (X, DomainError, ExprSyntaxError, differentiate, evaluate, parse, smoothness_check,
                                to_text)
from schwartz_comp.corpus import BUILTIN, PHI_HAT_1, PHI_HAT_2, SIGN_EXP_ABS
from schwartz_comp.verdict import Status, Verdict


def test_parse_polynomial():
    f = parse("x^2+1")
    assert f.is_single and f.is_polynomial()
    assert sp.Poly(f.expr, X).degree() == 2


def test_parse_piecewise_blend_has_three_pieces():
    f = parse(SIGN_EXP_ABS)
    assert len(f.pieces) == 3
    assert f.blend_order == 8
    assert [p.origin for p in f.pieces] == ["given", "blend", "given"]


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x^^2")
    assert err.value.offset == 2


@pytest.mark.parametrize("text", [
    "piecewise((-inf,1]: x; [0,inf): x)",  # overlap
    "piecewise((-inf,2]: x; [3,1]: x; [4,inf): 1)",  # empty interval
    "piecewise((-inf,0]: x; [1,inf): x)",  # gap without blend
    "exp(",
])
def test_bad_inputs_rejected(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_literals_are_exact():
    f = parse("1.25*x - 2/5")
    assert f.expr == sp.Rational(5, 4) * X - sp.Rational(2, 5)


def test_differentiate_examples():
    assert differentiate(parse("x^3"), 2).expr == 6 * X
    assert sp.simplify(differentiate(parse("exp(x^2)"), 1).expr - 2 * X * sp.exp(X**2)) == 0
    f = parse("sin(x)")
    assert differentiate(f, 0) is f


def test_differentiate_composes_exactly_on_polynomials():
    f = parse("3*x^7 - x^4 + 2/3*x")
    for a in range(4):
        for b in range(4):
            lhs = differentiate(differentiate(f, a), b).expr
            rhs = differentiate(f, a + b).expr
            assert sp.expand(lhs - rhs) == 0


def test_differentiate_composes_numerically():
    f = parse("exp(sin(x)) * cos(2*x)")
    rng = np.random.default_rng(3)
    xs = rng.uniform(-5, 5, 100)
    lhs = differentiate(differentiate(f, 2), 1).values(xs)[0]
    rhs = differentiate(f, 3).values(xs)[0]
    assert np.allclose(lhs, rhs, rtol=1e-8, atol=1e-12)


def test_evaluate_examples():
    assert evaluate(parse("exp(-x^2)"), 1) == pytest.approx(math.exp(-1), abs=1e-9)
    v = evaluate(parse("x^2+1"), 3)
    assert v == Fraction(10) and isinstance(v, Fraction)
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), -1)


def test_evaluate_rational_path_matches_float():
    f = parse("x^5 - 3*x^2 + 1/7")
    for q in (Fraction(1, 3), Fraction(-7, 2), Fraction(11, 5)):
        exact = evaluate(f, q)
        assert exact == Fraction(q) ** 5 - 3 * Fraction(q) ** 2 + Fraction(1, 7)
        assert float(f(np.array([float(q)]))[0]) == pytest.approx(float(exact), rel=1e-14)


def test_breakpoint_takes_left_piece():
    f = parse("piecewise((-inf,0]: 1; [0,inf): 2)")
    assert evaluate(f, 0) == 1


def test_high_precision_evaluation():
    v = evaluate(parse("exp(x)"), 1, precision=40)
    with mpmath.workdps(40):
        assert str(v).startswith("2.71828182845904523536028747135266249775")


def test_smoothness_kink_fails():
    v = smoothness_check(parse("piecewise((-inf,0]: -x; [0,inf): x)"), 1)
    assert v.status is Status.FAILS
    w = v.witness[0]
    assert w["x"] == 0 and w["order"] == 1 and w["jump"] == pytest.approx(2)


def test_smoothness_single_piece_holds():
    assert smoothness_check(parse("sin(x)*exp(x)"), 6).ok


def test_smoothness_blend_holds_and_matches_finite_differences():
    f = parse(SIGN_EXP_ABS)
    assert smoothness_check(f, 8, 1e-6).ok
    # one-sided finite differences across the joins at -1 and 1
    h = 1e-4
    for bp in (-1.0, 1.0):
        left = f.values(np.array([bp - h]), 1)[1][0]
        right = f.values(np.array([bp + h]), 1)[1][0]
        assert left == pytest.approx(right, rel=1e-3)


@pytest.mark.parametrize("text", sorted({e.input for e in BUILTIN} | {PHI_HAT_1, PHI_HAT_2}))
def test_print_parse_roundtrip(text):
    f = parse(text)
    g = parse(to_text(f))
    assert to_text(g) == to_text(f)
    xs = np.linspace(-3, 3, 41)
    assert np.allclose(f(xs), g(xs), rtol=1e-12, equal_nan=True)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(Status.FAILS, witness=[])
    with pytest.raises(ValueError):
        Verdict(Status.HOLDS)
    with pytest.raises(ValueError):
        Verdict(Status.HOLDS, certificate={"a": 1}, witness=[{"x": 0}])
    assert Verdict.holds({"C": 1}).to_dict() == {"status": "Holds", "certificate": {"C": 1}}


def test_random_polynomial_parse_matches_sympy():
    rng = random.Random(7)
    for _ in range(20):
        coeffs = [rng.randint(-9, 9) for _ in range(5)]
        text = " + ".join(f"({c})*x^{i}" for i, c in enumerate(coeffs))
        assert sp.expand(parse(text).expr - sum(c * X**i for i, c in enumerate(coeffs))) == 0
