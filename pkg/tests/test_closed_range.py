import pytest

from schwartz_comp.config import DEFAULT
from schwartz_comp.closed_range import (RULE_ORDER, AssumptionSet, NotASymbolError, _lower_bound_fails,
                                        cinf_heuristic, decide)
from schwartz_comp.corpus import PHI_HAT_1, PHI_HAT_2, SIGN_EXP_ABS, SIGN_EXP_SQ
from schwartz_comp.expr import parse

NECESSARY = {"nec-cinf", "nec-growth", "asterisco"}
SUFFICIENT = {"suf-om", "suf-nonsurj", "suf-surj"}


@pytest.fixture(scope="module")
def verdicts():
    cache = {}

    def get(text, **assume):
        key = (text, tuple(sorted(assume.items())))
        if key not in cache:
            cache[key] = decide(parse(text), AssumptionSet(**assume))
        return cache[key]

    return get


def rule(v, name):
    return next(r for r in v.trace if r.rule == name)


def test_cinf_heuristic_examples():
    assert cinf_heuristic(parse("x^3")).status.value == "Inconclusive"
    assert cinf_heuristic(parse("x^2")).ok
    assert cinf_heuristic(parse(PHI_HAT_1)).ok


def test_x2_closed_via_om(verdicts):
    v = verdicts("x^2")
    assert v.status == "Closed" and "suf-om" in v.fired
    assert "suf-nonsurj" in v.fired


def test_x3_closed_via_om(verdicts):
    v = verdicts("x^3")
    assert v.status == "Closed"
    params = rule(v, "suf-om").premises["multiplier_dphi"]["params"]
    assert params == {"N": 3, "T": 1.0, "c": 1.0}
    assert not rule(v, "suf-nonsurj").fired
    assert not rule(v, "nec-growth").fired


def test_x3_surjective_rule_with_user_flag(verdicts):
    v = verdicts("x^3", cinf_closed_range="yes")
    r = rule(v, "suf-surj")
    assert r.fired and r.detail == "I1 = -inf:-1.0, I2 = 1.0:inf"


def test_identity_closed(verdicts):
    v = verdicts("x", cinf_closed_range="yes")
    assert v.status == "Closed" and "suf-surj" in v.fired
    assert not rule(v, "asterisco").fired


def test_sign_exp_abs_not_closed(verdicts):
    v = verdicts(SIGN_EXP_ABS)
    assert v.status == "NotClosed"
    assert {"asterisco", "nec-growth"} <= set(v.fired)
    assert all(not r.evaluated for r in v.trace if r.rule in SUFFICIENT)


def test_sign_exp_sq_not_closed(verdicts):
    v = verdicts(SIGN_EXP_SQ)
    assert v.status == "NotClosed" and "asterisco" in v.fired


def test_phi_hat_1_not_closed(verdicts):
    v = verdicts(PHI_HAT_1)
    assert v.status == "NotClosed" and "asterisco" in v.fired
    assert not rule(v, "nec-cinf").fired
    cand = rule(v, "asterisco").premises["candidates"][-1]
    assert cand["membership_f"] == "Fails" and cand["membership_f_o_phi"] == "Holds"


def test_phi_hat_2_closed_on_linear_branch(verdicts):
    v = verdicts(PHI_HAT_2)
    assert v.status == "Closed" and "suf-nonsurj" in v.fired
    assert rule(v, "suf-nonsurj").detail == "I = 5.356694:inf"


def test_cinf_flag_no_forces_not_closed(verdicts):
    v = verdicts("x", cinf_closed_range="no")
    assert v.status == "NotClosed" and v.fired == ["nec-cinf"]
    assert v.witness["rule"] == "nec-cinf"


@pytest.mark.parametrize("text", ["x", "x^2", "x^3", SIGN_EXP_ABS, PHI_HAT_1, PHI_HAT_2])
def test_rule_consistency(verdicts, text):
    v = verdicts(text)
    fired = set(v.fired)
    assert not (fired & NECESSARY and fired & SUFFICIENT)
    assert [r.rule for r in v.trace] == list(RULE_ORDER)


def test_lower_bound_detects_fast_decay():
    assert _lower_bound_fails(parse("exp(-x^2)"), DEFAULT) is not None
    assert _lower_bound_fails(parse("3*x^2"), DEFAULT) is None


def test_non_symbol_rejected():
    with pytest.raises(NotASymbolError):
        decide(parse("sin(x)"))


def test_bad_assumption_value():
    with pytest.raises(ValueError):
        AssumptionSet(cinf_closed_range="maybe")


def test_trace_serializes(verdicts):
    d = verdicts("x^2").to_dict()
    assert d["status"] == "Closed"
    assert all("basis" in r for r in d["trace"])
