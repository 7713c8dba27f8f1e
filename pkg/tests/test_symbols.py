import math

import numpy as np
import pytest

from schwartz_comp.corpus import SIGN_EXP_ABS
from schwartz_comp.expr import parse
from schwartz_comp.symbols import (NotSmoothError, analyze_symbol, check_condition_i, check_condition_ii,
                                   check_condition_star, check_limit_infinity, check_om, check_surjective,
                                   continuity_estimate, is_symbol, verify_condition_i, verify_continuity)
from schwartz_comp.verdict import Status

TEST_FUNCTIONS = ["exp(-x^2)", "exp(-2*x^2)", "exp(-x^2)*sin(x)", "exp(-x^2)*cos(2*x)", "x*exp(-x^2)",
                  "2/(exp(x)+exp(-x))", "exp(-x^4)", "(1+x^2)*exp(-x^2)", "exp(-(x-1)^2)", "exp(-x^2/2)*x^2"]


def test_cubic_is_symbol_with_full_range():
    v, rng = check_limit_infinity(parse("x^3"))
    assert v.ok and rng.kind == "R"


def test_sin_fails_lemma1_at_multiples_of_pi():
    v, rng = check_limit_infinity(parse("sin(x)"))
    assert v.failed and rng is None
    for w in v.witness:
        assert w["x"] / math.pi == pytest.approx(round(w["x"] / math.pi))
        assert abs(w["phi"]) < 1e-9


def test_exp_fails_on_left_tail():
    v, _ = check_limit_infinity(parse("exp(x)"))
    assert v.failed
    xs = [w["x"] for w in v.witness]
    assert all(x < 0 for x in xs) and xs == sorted(xs, reverse=True)


def test_constant_fails_lemma1():
    v, _ = check_limit_infinity(parse("3"))
    assert v.failed and v.notes["ell"] == 3


def test_range_classification():
    _, rng = check_limit_infinity(parse("x^2+1"))
    assert rng.kind == "[a,inf)" and rng.endpoint == pytest.approx(1.0) and rng.attained_at == pytest.approx(0.0)
    _, rng = check_limit_infinity(parse("-x^4+2"))
    assert rng.kind == "(-inf,b]" and rng.endpoint == pytest.approx(2.0)
    _, rng = check_limit_infinity(parse("exp(x^2)"))
    assert rng.kind == "[a,inf)" and rng.endpoint == pytest.approx(1.0, abs=1e-9)


def test_kinked_piecewise_is_rejected():
    with pytest.raises(NotSmoothError):
        check_limit_infinity(parse("piecewise((-inf,0]: -x; [0,inf): x)"))


def test_condition_i_x2_exact():
    v = check_condition_i(parse("x^2"), 3)
    assert v.ok and v.certificate["method"] == "exact"
    assert v.certificate["per_j"]["1"]["p"] == 1
    # |2x| <= C (1 + x^4): the sup of the ratio is attained near x = 0.537
    xs = np.linspace(-10, 10, 200001)
    oracle = np.max(2 * np.abs(xs) / (1 + xs**4))
    assert v.certificate["per_j"]["1"]["C"] >= oracle * (1 - 1e-6)
    assert verify_condition_i(parse("x^2"), v.certificate)


def test_condition_i_exp_x2():
    v = check_condition_i(parse("exp(x^2)"), 2)
    assert v.ok
    assert verify_condition_i(parse("exp(x^2)"), v.certificate)


def test_condition_i_oscillating_fails_at_j1():
    v = check_condition_i(parse("x+sin(exp(x^2))"), 2)
    assert v.failed and v.notes["j"] == 1
    assert all(w["j"] == 1 for w in v.witness)


def test_condition_ii_examples():
    v = check_condition_ii(parse("x^3"))
    assert v.ok and v.certificate["k"] == 1
    v = check_condition_ii(parse("exp(x^2)"))
    assert v.ok and v.certificate["k"] == 1
    v = check_condition_ii(parse("1+log(1+x^2)"))
    assert v.failed and len(v.witness) >= 1


def test_condition_ii_root_growth_needs_k():
    # grows like |x|^(1/2): needs k = 2
    v = check_condition_ii(parse("sqrt(sqrt(1+x^2))"))
    assert v.ok and v.certificate["k"] == 2


@pytest.mark.parametrize("text,expected", [("x^2+1", Status.HOLDS), ("exp(x^2)", Status.HOLDS),
                                           ("1+log(1+x^2)", Status.FAILS)])
def test_is_symbol_examples(text, expected):
    assert is_symbol(parse(text)).status is expected


def test_is_symbol_reports_failed_part():
    v = is_symbol(parse("1+log(1+x^2)"))
    assert v.notes["failed"] == "condition_ii"


def test_condition_star():
    assert check_condition_star(parse("x^3"), 3).ok
    assert check_condition_star(parse(SIGN_EXP_ABS), 2).ok
    v = check_condition_star(parse("x+sin(exp(x^2))"), 2)
    assert v.failed and v.notes["j"] == 1


def test_om_examples():
    assert check_om(parse("x^5"), 4).ok
    assert check_om(parse("exp(x^2)"), 2).failed
    assert check_om(parse("exp(-x^2)"), 4).ok


def test_surjective():
    assert check_surjective(parse("x^3")).ok
    v = check_surjective(parse("x^2+1"))
    assert v.failed and v.witness[0]["bounded"] == "below"


def test_continuity_identity():
    b = continuity_estimate(parse("x"), 1)
    assert b.k == 1 and b.t == 2 and b.index == 3


@pytest.mark.parametrize("phi,n", [("x", 1), ("x^2", 1), ("x^3", 2)])
def test_continuity_bound_holds_on_test_functions(phi, n):
    p = parse(phi)
    b = continuity_estimate(p, n)
    assert b.t > n and b.index == b.k * n + b.t
    funcs = TEST_FUNCTIONS if phi == "x^3" else TEST_FUNCTIONS[:1]
    for f in funcs:
        lhs, rhs = verify_continuity(p, b, parse(f))
        assert lhs <= rhs + 1e-9, f


def test_continuity_needs_certificates():
    with pytest.raises(ValueError):
        continuity_estimate(parse("1+log(1+x^2)"), 1)


def test_analyze_symbol_report():
    rep = analyze_symbol(parse("x^2+1"), 2)
    d = rep.to_dict()
    assert d["is_symbol"]["status"] == "Holds"
    assert d["range"]["kind"] == "[a,inf)"
    assert d["surjective"]["status"] == "Fails"
    assert [c["n"] for c in d["continuity"]] == [1, 2]
