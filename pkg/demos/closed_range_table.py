"""Run the closed-range rule engine on the reference inner functions and print the fired rules."""

from schwartz_comp.closed_range import decide
from schwartz_comp.corpus import PHI_HAT_1, PHI_HAT_2, SIGN_EXP_ABS, SIGN_EXP_SQ
from schwartz_comp.expr import parse

CASES = {"x": "x", "x^2": "x^2", "x^3": "x^3", "phi_hat_1": PHI_HAT_1, "phi_hat_2": PHI_HAT_2,
         "sign(x)e^|x|": SIGN_EXP_ABS, "sign(x)e^(x^2)": SIGN_EXP_SQ}

if __name__ == "__main__":
    for name, text in CASES.items():
        v = decide(parse(text))
        details = [r.detail for r in v.trace if r.fired and r.detail]
        print(f"{name:<16} {v.status:<13} {','.join(v.fired):<24} {'; '.join(details)}")
