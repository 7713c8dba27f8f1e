import math
import warnings

import numpy as np
import pytest

from schwartz_comp.config import DEFAULT, Config, load_config
from schwartz_comp.expr import parse
from schwartz_comp.norms import SupportLeakWarning, d_norm, decay_report, membership_S, seminorm_csv_rows, seminorm_pi
from schwartz_comp.numeric import Region
from schwartz_comp.verdict import Status

BUMP = "piecewise((-inf,-1/2]: 0; (-1/2,1/2): exp(1-1/(1-4*x^2)); [1/2,inf): 0)"


def dense_oracle(fun, a, b, n=10**6):
    x = np.linspace(a, b, n)
    return float(np.max(np.abs(fun(x)))), x


def test_gaussian_pi1():
    est = seminorm_pi(parse("exp(-x^2)"), 1)
    assert est.value == pytest.approx(4 / math.e, abs=1e-5)
    assert est.witness[1] == 1 and est.witness[0] == pytest.approx(1.0, abs=1e-3)
    assert est.tail_status == "decaying"
    assert est.integrand(parse("exp(-x^2)")) == pytest.approx(est.log_value, abs=1e-12)


def test_zero_function():
    est = seminorm_pi(parse("0"), 3)
    assert est.value == 0.0


def test_inverse_square_grows_at_n2():
    est = seminorm_pi(parse("1/(1+x^2)"), 2)
    assert est.tail_status == "growing"


def test_region_variant_and_bad_n():
    est = seminorm_pi(parse("exp(-x)"), 1, Region.parse("0:inf"))
    assert est.tail_status == "decaying"
    with pytest.raises(ValueError):
        seminorm_pi(parse("x"), 0)


def test_scaling_exact():
    f, g = parse("exp(-x^2)*sin(x)"), parse("-3*exp(-x^2)*sin(x)")
    a, b = seminorm_pi(f, 2), seminorm_pi(g, 2)
    assert b.log_value == pytest.approx(a.log_value + math.log(3), abs=1e-9)


def test_monotone_in_n():
    f = parse("exp(-x^2)")
    vals = [seminorm_pi(f, n).value for n in range(1, 5)]
    assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))


def test_refinement_only_increases():
    f = parse("exp(-x^2)*cos(3*x)")
    lo = seminorm_pi(f, 2, cfg=DEFAULT.replace(refine_depth=0)).value
    hi = seminorm_pi(f, 2, cfg=DEFAULT.replace(refine_depth=30)).value
    assert hi >= lo


def test_membership_examples():
    assert membership_S(parse("exp(-x^2)"), 4).ok
    v = membership_S(parse("1/(1+x^2)"), 2)
    assert v.status is Status.FAILS
    assert v.witness[0]["m"] >= 1 and "m=2,j=0" in v.notes["failing_pairs"]
    v = membership_S(parse("exp(-x)"), 1)
    assert v.status is Status.FAILS
    assert all(isinstance(w["x"], float) and w["x"] < 0 for w in v.witness)


def test_decay_report_covers_pairs():
    rep, _, _ = decay_report(parse("exp(-x^2)"), 3, 2)
    assert set(rep.statuses) == {(m, j) for m in range(4) for j in range(3)}
    assert all(s == "decaying" for s in rep.statuses.values())


def test_d_norm_bump():
    f = parse(BUMP)
    assert d_norm(f, 0, -0.5, 0.5) == pytest.approx(1.0, abs=1e-12)
    oracle1, x = dense_oracle(lambda t: f.values(t, 1)[1], -0.5, 0.5)
    assert d_norm(f, 1, -0.5, 0.5) == pytest.approx(1.0 + oracle1, abs=1e-6)


def test_d_norm_zero_and_monotone():
    assert d_norm(parse("0"), 3, 0, 1) == 0.0
    f = parse(BUMP)
    vals = [d_norm(f, n, -0.5, 0.5) for n in range(4)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_d_norm_support_leak_warns():
    with pytest.warns(SupportLeakWarning):
        d_norm(parse("exp(-x^2)"), 0, -1, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d_norm(parse(BUMP), 0, -0.5, 0.5)


def test_csv_rows():
    rows = list(seminorm_csv_rows(parse("exp(-x^2)"), 1))
    assert rows and all(len(r) == 5 for r in rows)
    assert {r[1] for r in rows} == {0, 1}


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# window\nx_max = 500\nt_values = 1, 2\nseed=3\n")
    cfg = load_config(p, {"seed": "9"})
    assert cfg.x_max == 500.0 and cfg.t_values == (1.0, 2.0) and cfg.seed == 9
    assert cfg.to_dict()["t_values"] == [1.0, 2.0]
    with pytest.raises(KeyError):
        load_config(None, {"nope": "1"})
    assert Config() == DEFAULT
