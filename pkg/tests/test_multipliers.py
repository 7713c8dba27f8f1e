import numpy as np
import pytest

from schwartz_comp.config import DEFAULT
from schwartz_comp.corpus import PHI_HAT_2_PRIME_REGION
from schwartz_comp.expr import parse
from schwartz_comp.multipliers import (ClosedRangeParams, check_conditions_ab, closed_range_multiplier, find_zeros,
                                       interval_IxT)
from schwartz_comp.numeric import FULL, Region

LEFT = Region.parse("-inf:0")


def zero_list(text, region=FULL):
    scan = find_zeros(parse(text), region)
    assert scan.complete
    return [(round(z.location, 12), z.multiplicity) for z in scan.zeros]


def test_zeros_examples():
    assert zero_list("2*x") == [(0.0, 1)]
    assert zero_list("x^2*(x-1)") == [(0.0, 2), (1.0, 1)]
    assert zero_list("exp(-x^2)") == []


def test_zeros_exact_and_isolated():
    scan = find_zeros(parse("(x^2-2)*(x+3)^3"))
    locs = {round(z.location, 9): z.multiplicity for z in scan.zeros}
    assert locs == {-3.0: 3, round(-2**0.5, 9): 1, round(2**0.5, 9): 1}
    assert scan.zeros[0].exact == "-3"
    for a, b in zip(scan.zeros, scan.zeros[1:]):
        assert a.location + a.isolation_radius <= b.location - b.isolation_radius + 1e-12


def test_zeros_restricted_to_region():
    assert zero_list("x*(x+1)", Region.parse("0:inf")) == [(0.0, 1)]


def test_zero_function_is_incomplete():
    assert not find_zeros(parse("0")).complete


def test_interval_examples():
    assert interval_IxT(0, 1) == (-1, 1)
    assert interval_IxT(1, 1) == (0.5, 1.5)
    assert interval_IxT(0, 1, Region.parse("0:inf")) == (0, 1)
    with pytest.raises(ValueError):
        interval_IxT(0, 0)


def test_params_validation():
    with pytest.raises(ValueError):
        ClosedRangeParams(0, 1, 1)


def test_ab_constant_one():
    assert check_conditions_ab(parse("1"), ClosedRangeParams(1, 1, 0.5)).ok


def test_ab_linear():
    v = check_conditions_ab(parse("2*x"), ClosedRangeParams(2, 1, 1))
    assert v.ok and v.certificate["max_zero_count"] == 1


def test_ab_linear_fails_with_n1():
    v = check_conditions_ab(parse("2*x"), ClosedRangeParams(1, 1, 1))
    assert v.failed and "(a)" in v.reason


@pytest.mark.parametrize("N,T,c", [(1, 1, 1), (4, 8, 2.0**-20), (2, 2, 0.5)])
def test_ab_gaussian_fails_on_tail(N, T, c):
    v = check_conditions_ab(parse("exp(-x^2)"), ClosedRangeParams(N, T, c))
    assert v.failed and "(b)" in v.reason
    assert max(abs(w["x"]) for w in v.witness) > 3


def test_multiplier_linear():
    res = closed_range_multiplier(parse("2*x"))
    assert res.verdict.ok
    assert res.params == ClosedRangeParams(2, 1, 1)
    assert res.reverify(parse("2*x"))


def test_multiplier_gaussian_fails():
    res = closed_range_multiplier(parse("exp(-x^2)"))
    assert res.verdict.failed and res.params is None


def test_left_branch_derivative_satisfies_ab_but_is_not_a_multiplier():
    F = parse("-exp(-x)")
    zeros = find_zeros(F, LEFT)
    assert zeros.complete and not zeros.zeros
    assert check_conditions_ab(F, ClosedRangeParams(1, 1, 0.5), LEFT, zeros).ok
    # the derivatives grow like e^|x| on the left half-line
    res = closed_range_multiplier(F, LEFT)
    assert res.verdict.failed and res.om.failed


def test_constant_multiplier_on_half_line():
    res = closed_range_multiplier(parse("-1"), Region.parse(PHI_HAT_2_PRIME_REGION))
    assert res.verdict.ok and res.reverify(parse("-1"))


def test_samples_digest_is_stable():
    a = closed_range_multiplier(parse("3*x^2"))
    b = closed_range_multiplier(parse("3*x^2"))
    assert a.verdict.ok and a.samples_digest() == b.samples_digest()
    assert np.array_equal(a.samples, b.samples)
    assert a.to_dict() == b.to_dict()


def test_reverify_rejects_tampered_params():
    res = closed_range_multiplier(parse("3*x^2"))
    res.params = ClosedRangeParams(res.params.N, res.params.T, 1e6)
    assert not res.reverify(parse("3*x^2"), DEFAULT)
