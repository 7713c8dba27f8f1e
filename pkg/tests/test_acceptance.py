"""Acceptance checks 1-9, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import contextlib
import io
import itertools
import json
import math
import random
import time

import numpy as np
import sympy as sp

from schwartz_comp.cli import main
from schwartz_comp.closed_range import decide
from schwartz_comp.corpus import PHI_HAT_1, PHI_HAT_2, SIGN_EXP_ABS, SIGN_EXP_SQ
from schwartz_comp.expr import X, parse
from schwartz_comp.faa_di_bruno import compose_derivative, enumerate_partitions, fdb_coefficient
from schwartz_comp.multipliers import closed_range_multiplier
from schwartz_comp.norms import seminorm_pi
from schwartz_comp.symbols import is_symbol
from schwartz_comp.witnesses import build_witness_cond_i, build_witness_cond_ii, noncompact_family

RESULTS: dict[int, tuple[bool, str]] = {}


def record(num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return ok


# ---------------------------------------------------------------------------


def check_1():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(50):
        fc = [sp.Rational(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 6))]
        pc = [sp.Rational(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 6))]
        f_sym = sum(c * X**i for i, c in enumerate(fc))
        p_sym = sum(c * X**i for i, c in enumerate(pc))
        f = parse(" + ".join(f"({c})*x^{i}" for i, c in enumerate(fc)))
        phi = parse(" + ".join(f"({c})*x^{i}" for i, c in enumerate(pc)))
        oracle = sp.expand(f_sym.subs(X, p_sym))
        for n in range(1, 7):
            oracle = sp.expand(sp.diff(oracle, X))
            if sp.expand(compose_derivative(f, phi, n).expr - oracle) != 0:
                bad += 1
    dt = time.perf_counter() - t0
    return record(1, bad == 0 and dt < 10, f"50 pairs x n<=6, mismatches={bad}, {dt:.2f}s (<10s)")


def _brute_count(n):
    ranges = [range(n // i + 1) for i in range(1, n + 1)]
    return sum(1 for k in itertools.product(*ranges) if sum((i + 1) * ki for i, ki in enumerate(k)) == n)


def check_2():
    counts_ok = all(len(enumerate_partitions(n)) == _brute_count(n) for n in range(1, 13))
    p12 = len(enumerate_partitions(12))
    # oracle: expand the 4th derivative of f(g(x)) symbolically and read off monomial coefficients
    f, g, u = sp.Function("f"), sp.Function("g"), sp.Symbol("u")
    expr = sp.expand(sp.diff(f(g(X)), X, 4))
    oracle, got = {}, {}
    for p in enumerate_partitions(4):
        mono = sp.Subs(sp.Derivative(f(u), (u, p.k_total)), u, g(X)).doit()
        for i, ki in enumerate(p.k, start=1):
            mono *= sp.diff(g(X), X, i) ** ki
        oracle[p.k] = int(expr.coeff(mono))
        got[p.k] = fdb_coefficient(p)
    ok = counts_ok and p12 == 77 and got == oracle and sorted(got.values()) == [1, 1, 3, 4, 6]
    return record(2, ok, f"counts n<=12 match brute force={counts_ok}, p(12)={p12}, n=4 coefficients={sorted(got.values())}")


def check_3():
    t0 = time.perf_counter()
    est = seminorm_pi(parse("exp(-x^2)"), 1)
    dt = time.perf_counter() - t0
    x = np.linspace(-20, 20, 10**6)
    g = np.exp(-x * x)
    w = 1 + x * x
    oracle = max(np.max(g), np.max(np.abs(-2 * x * g)), np.max(w * g), np.max(w * np.abs(2 * x * g)))
    ok = (abs(est.value - oracle) <= 1e-5 and abs(est.value - 4 / math.e) <= 1e-5
          and abs(abs(est.witness[0]) - 1) <= 1e-3 and dt < 5)
    return record(3, ok, f"pi_1={est.value:.9f}, oracle={oracle:.9f}, 4/e={4 / math.e:.9f}, "
                         f"witness x={est.witness[0]:.6f}, {dt:.2f}s (<5s)")


SYMBOL_CASES = [("x", "Holds"), ("x^2+1", "Holds"), ("x^3", "Holds"), ("exp(x^2)", "Holds"),
                ("sin(x)", "Fails(lemma1)"), ("exp(x)", "Fails(lemma1)"), ("3", "Fails(lemma1)"),
                ("-2", "Fails(lemma1)"), ("0", "Fails(lemma1)"),
                ("1+log(1+x^2)", "Fails(condition_ii)"), ("x+sin(exp(x^2))", "Fails(condition_i)")]


def check_4():
    wrong, inconclusive = [], 0
    for text, want in SYMBOL_CASES:
        v = is_symbol(parse(text))
        got = v.status.value if not v.failed else f"Fails({v.notes.get('failed')})"
        inconclusive += got == "Inconclusive"
        if got != want:
            wrong.append(f"{text}: {got}")
    ok = not wrong and inconclusive == 0
    return record(4, ok, f"{len(SYMBOL_CASES) - len(wrong)}/{len(SYMBOL_CASES)} verdicts match, "
                         f"inconclusive={inconclusive}" + (f", wrong={wrong}" if wrong else ""))


def check_5():
    _, rep_ii = build_witness_cond_ii(parse("1+log(1+x^2)"), 10)
    vals = [float(r["value"]) for r in rep_ii.get("rows", [])]
    member = rep_ii.get("membership", {})
    ok_ii = len(vals) == 10 and min(vals) >= 0.9 and all(member.get(m) == "Holds" for m in (1, 2, 3, 4))
    _, rep_i = build_witness_cond_i(parse("x+sin(exp(x^2))"), 1, 8)
    ratios = [float(r["ratio"]) for r in rep_i.get("rows", [])]
    ok_i = len(ratios) == 8 and min(ratios) >= 0.9
    return record(5, ok_ii and ok_i, f"(ii) min |x_j f(phi(x_j))|={min(vals, default=float('nan')):.4f} over "
                                     f"{len(vals)} points, membership={member}; (i) min |(f o phi)'(x_k)|/k="
                                     f"{min(ratios, default=float('nan')):.4f} over {len(ratios)} points")


def check_6():
    t0 = time.perf_counter()
    fam = noncompact_family(parse("x^3+x"), 1, 2, p=2, eps=1.0, J=20)
    dt = time.perf_counter() - t0
    norms = [m.norm_pm1 for m in fam.members]
    comp = [m.sup_composed >= m.j for m in fam.members]
    ok = (len(fam.members) == 20 and all(0.999 <= v <= 1.001 for v in norms) and all(comp) and dt < 30)
    return record(6, ok, f"{len(fam.members)} members, ||f_j||_1 in [{min(norms):.6f}, {max(norms):.6f}], "
                         f"sup|(f_j o phi)''| >= j for all={all(comp)}, delta={fam.delta:g}, "
                         f"lambda_2={fam.lam:g}, {dt:.1f}s (<30s)")


def check_7():
    parts, ok = [], True
    for text in ("1", "2*x", "3*x^2"):
        F = parse(text)
        res = closed_range_multiplier(F)
        good = res.verdict.ok and res.params is not None and res.reverify(F)
        ok &= good
        parts.append(f"{text}: {res.verdict.status.value} {res.params.to_dict() if res.params else None} "
                     f"reverified={good}")
    res = closed_range_multiplier(parse("exp(-x^2)"))
    ok &= res.verdict.failed
    parts.append(f"exp(-x^2): {res.verdict.status.value}")
    return record(7, ok, "; ".join(parts))


CLOSED_CASES = [("x^2", "x^2", "Closed", "suf-om"), ("phi_hat_2", PHI_HAT_2, "Closed", "suf-nonsurj"),
                ("sign(x)e^|x|", SIGN_EXP_ABS, "NotClosed", "asterisco"),
                ("sign(x)e^(x^2)", SIGN_EXP_SQ, "NotClosed", "asterisco"),
                ("phi_hat_1", PHI_HAT_1, "NotClosed", "asterisco")]


def check_8():
    parts, ok = [], True
    for name, text, want, rule in CLOSED_CASES:
        v = decide(parse(text))
        good = v.status == want and rule in v.fired
        if name == "phi_hat_2":
            detail = next(r.detail for r in v.trace if r.rule == "suf-nonsurj")
            good &= detail == "I = 5.356694:inf"
        ok &= good
        parts.append(f"{name}: {v.status} via {','.join(v.fired)}")
    return record(8, ok, "; ".join(parts))


def _corpus_json():
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["corpus", "--format", "json"])
    return code, buf.getvalue()


def check_9():
    c1, a = _corpus_json()
    c2, b = _corpus_json()
    rep = json.loads(a)
    ok = a == b and c1 == c2 == 0
    return record(9, ok, f"two corpus runs byte-identical={a == b} ({len(a)} bytes), "
                         f"matched {rep['result']['matched']}/{rep['result']['total']}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9]


def test_criterion_1_faa_di_bruno_exact():
    assert check_1()


def test_criterion_2_partitions_and_coefficients():
    assert check_2()


def test_criterion_3_seminorm_oracle():
    assert check_3()


def test_criterion_4_symbol_corpus():
    assert check_4()


def test_criterion_5_witness_fidelity():
    assert check_5()


def test_criterion_6_noncompact_family():
    assert check_6()


def test_criterion_7_multiplier_verdicts():
    assert check_7()


def test_criterion_8_closed_range_conclusions():
    assert check_8()


def test_criterion_9_deterministic_json():
    assert check_9()


if __name__ == "__main__":
    results = [c() for c in CHECKS]
    raise SystemExit(0 if all(results) else 1)
