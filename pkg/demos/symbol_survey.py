"""Classify a handful of inner functions and print why each one is or is not a symbol."""

import argparse

from schwartz_comp.expr import parse
from schwartz_comp.symbols import analyze_symbol

DEFAULT = ["x^2+1", "x^3", "exp(x^2)", "sin(x)", "1+log(1+x^2)", "x+sin(exp(x^2))"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("phi", nargs="*", default=DEFAULT)
    ap.add_argument("--max-j", type=int, default=3)
    args = ap.parse_args()
    for text in args.phi:
        rep = analyze_symbol(parse(text), args.max_j)
        sym = rep.symbol
        why = sym.notes.get("failed", "") if sym.failed else ""
        rng = rep.range.kind if rep.range else "-"
        print(f"{text:<22} {sym.status.value:<12} {why:<13} range={rng:<9} "
              f"(i)={rep.cond_i.status.value:<12} (ii)={rep.cond_ii.status.value}")
        for c in rep.continuity[:2]:
            print(f"{'':<22} pi_{c.n}(f o phi) <= {c.factor:.3g} * pi_{c.index}(f)")


if __name__ == "__main__":
    main()
