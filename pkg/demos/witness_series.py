"""Build the bump-series counterexamples for two non-symbols and print their check tables."""

import argparse

from schwartz_comp.expr import parse
from schwartz_comp.witnesses import build_witness_cond_i, build_witness_cond_ii


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--terms", type=int, default=6)
    args = ap.parse_args()

    series, rep = build_witness_cond_ii(parse("1+log(1+x^2)"), args.terms)
    print(f"slow growth, phi = 1+log(1+x^2): {rep['status']}, membership {rep['membership']}")
    for r in rep["rows"]:
        print(f"  j={r['j']:<3} log|x_j|={float(r['log_x']):10.4f}  |x_j| f(phi(x_j))={float(r['value']):.5f}")

    series, rep = build_witness_cond_i(parse("x+sin(exp(x^2))"), 1, args.terms)
    print(f"fast oscillation, phi = x+sin(exp(x^2)): {rep['status']}, bump p(x) = {rep['bump_p']}")
    for r in rep["rows"]:
        print(f"  k={r['k']:<3} x_k={float(r['x']):.6f}  |(f o phi)'(x_k)|/k={float(r['ratio']):.5f}  dps={r['dps']}")
    print(series.to_text(8)[:160] + " ...")


if __name__ == "__main__":
    main()
