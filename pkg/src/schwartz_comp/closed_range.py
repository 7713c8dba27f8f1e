"""Rule-based verdict on whether ``f -> f o phi`` has closed range in S(R).

Necessary conditions are tried first (any one firing gives NotClosed), then
sufficient conditions (any one firing gives Closed). Each rule records the
premise verdicts it used, so a decision can be replayed rule by rule.

Rule ids:

* ``nec-cinf``     closed range on S forces closed range on C^oo
* ``nec-growth``   surjective phi with phi' eventually nonzero needs phi in O_M
                   and ``|phi'| >= c (1+x^2)^-T``
* ``asterisco``    under (*) and surjectivity, ``f o phi`` in S forces f in S
* ``suf-om``       phi in O_M and ``M_phi'`` closed range on S(R)
* ``suf-nonsurj``  non-surjective phi, C^oo closed range, ``M_phi'`` closed on S(I)
* ``suf-surj``     surjective phi, C^oo closed range, ``M_phi'`` closed on two half-lines
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT, Config
from .expr import PiecewiseFn, differentiate, parse
from .faa_di_bruno import Composition
from .multipliers import closed_range_multiplier, find_zeros
from .norms import membership_S
from .numeric import FULL, Region, base_grid, classify_tail
from .symbols import (_r, analyze_symbol, check_condition_star, check_limit_infinity, check_om, grid_samples)
from .verdict import Status, Verdict

# 0 for y <= 0, 1/y for y >= 1, smooth in between; and its reflection
DEFAULT_CANDIDATE = "piecewise((-inf,0]: 0; [1,inf): 1/x; blend: 8)"
REFLECTED_CANDIDATE = "piecewise((-inf,-1]: -1/x; [0,inf): 0; blend: 8)"

RULE_ORDER = ("nec-cinf", "nec-growth", "asterisco", "suf-om", "suf-nonsurj", "suf-surj")

BASIS = {
    "nec-cinf": "closed range on S(R) implies closed range on C^oo(R); contrapositive",
    "nec-growth": "surjective symbol, phi' != 0 for large |x|, closed range => phi in O_M and |phi'| >= c(1+x^2)^-T",
    "asterisco": "under (*): f smooth and f o phi in S(R) imply f in S(R); a violating f rules out closed range",
    "suf-om": "phi in O_M symbol and M_phi' closed range on S(R) => closed range",
    "suf-nonsurj": "non-surjective, C^oo closed range, M_phi' closed range on S(I) for a closed unbounded I => closed range",
    "suf-surj": "surjective, C^oo closed range, M_phi' closed range on S(I1) and S(I2) with bounded complement => closed range",
}


class NotASymbolError(ValueError):
    pass


@dataclass
class AssumptionSet:
    cinf_closed_range: str = "auto"  # yes | no | auto | unknown
    derivative_eventually_nonvanishing: str = "auto"  # yes | no | auto
    notes: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.cinf_closed_range not in ("yes", "no", "auto", "unknown"):
            raise ValueError("cinf_closed_range must be yes|no|auto|unknown")
        if self.derivative_eventually_nonvanishing not in ("yes", "no", "auto"):
            raise ValueError("derivative_eventually_nonvanishing must be yes|no|auto")


@dataclass
class RuleRecord:
    rule: str
    fired: bool
    conclusion: str | None
    premises: dict[str, Any]
    detail: str = ""
    evaluated: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {"rule": self.rule, "basis": BASIS[self.rule], "evaluated": self.evaluated, "fired": self.fired,
                "conclusion": self.conclusion, "premises": self.premises, "detail": self.detail}


@dataclass
class ClosedRangeVerdict:
    status: str  # Closed | NotClosed | Inconclusive
    trace: list[RuleRecord]
    witness: dict[str, Any] | None
    assumptions: dict[str, str]
    advisory: list[str] = field(default_factory=list)

    @property
    def fired(self) -> list[str]:
        return [r.rule for r in self.trace if r.fired]

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "fired": self.fired, "assumptions": self.assumptions,
                "witness": self.witness, "advisory": self.advisory, "trace": [r.to_dict() for r in self.trace]}


# ---------------------------------------------------------------------------
# C^oo closed-range heuristic


def _regular_preimage(phi, v: float, avoid: float, cfg: Config) -> float | None:
    """A preimage of ``v`` away from ``avoid`` where ``|phi'| > tol``."""
    x, s, la = grid_samples(phi, 1, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        g = s[0] * np.exp(la[0]) - v
    sg = np.sign(g)
    cand = list(np.flatnonzero(sg == 0))
    cand += list(np.flatnonzero(sg[:-1] * sg[1:] < 0))
    cand.sort(key=lambda i: (abs(x[i] - avoid) < 1e-6, abs(x[i])))
    for i in cand:
        if sg[i] == 0:
            r = float(x[i])
        else:
            f = lambda z: float(phi.values(np.array([z]), 0)[0, 0]) - v
            try:
                r = brentq(f, x[i], x[i + 1], xtol=1e-14)
            except ValueError:
                continue
        if abs(r - avoid) <= 1e-6:
            continue
        d = float(phi.values(np.array([r]), 1)[1, 0])
        if abs(d) > cfg.tol:
            return r
    return None


def cinf_heuristic(phi, cfg: Config = DEFAULT) -> Verdict:
    """Sufficient-only: every attained value has a preimage with ``phi' != 0``.

    Only critical values need a search; regular values qualify at every
    preimage. Range endpoints of a non-surjective phi are skipped. Never Fails.
    """
    lim, rng = check_limit_infinity(phi, cfg)
    if not lim.ok:
        return Verdict.inconclusive("|phi| -> oo not established")
    scan = find_zeros(differentiate(phi, 1) if isinstance(phi, PiecewiseFn) else phi, FULL, cfg=cfg)
    if not scan.complete:
        return Verdict.inconclusive(f"critical points not fully located: {scan.note}")
    checked = []
    for z in scan.zeros:
        v = float(phi.values(np.array([z.location]), 0)[0, 0])
        if rng.kind != "R" and abs(v - rng.endpoint) <= cfg.endpoint_exclusion * max(1.0, abs(v)):
            checked.append({"critical_point": _r(z.location), "value": _r(v), "skipped": "range endpoint"})
            continue
        r = _regular_preimage(phi, v, z.location, cfg)
        if r is None:
            return Verdict.inconclusive(f"critical value {v:.12g} (at x={z.location:.12g}) has no regular preimage on the grid",
                                        critical=checked)
        checked.append({"critical_point": _r(z.location), "value": _r(v), "regular_preimage": _r(r)})
    return Verdict.holds({"critical_values": checked, "range": rng.to_dict()})


# ---------------------------------------------------------------------------
# helpers


def _halfline_candidates(phi, cfg: Config) -> dict[int, list[Region]]:
    """Right then left half-lines: outermost finite breakpoints first, then radii."""
    right, left = [], []
    if isinstance(phi, PiecewiseFn) and not phi.is_single:
        bps = [float(b) for b in phi.breakpoints]
        right.append(Region(max(bps), math.inf))
        left.append(Region(-math.inf, min(bps)))
    for r in cfg.halfline_radii:
        right.append(Region(r, math.inf))
        left.append(Region(-math.inf, -r))
    uniq = lambda rs: list(dict.fromkeys(rs))
    return {1: uniq(right), -1: uniq(left)}


def _first_closed(dphi, regions: list[Region], cfg: Config):
    tried = []
    for reg in regions:
        res = closed_range_multiplier(dphi, reg, cfg)
        tried.append({"region": reg.to_text(), "status": res.verdict.status.value})
        if res.verdict.ok:
            return res, tried
    return None, tried


def _lower_bound_fails(dphi, cfg: Config) -> dict[str, Any] | None:
    """``|phi'| >= c(1+x^2)^-T`` fails for every lattice (c, T) along a tail."""
    x, s, la = grid_samples(dphi, 0, cfg)
    t_max = max(cfg.t_values)
    for side in (1, -1):
        sel = (np.sign(x) == side) & (np.abs(x) >= cfg.tail_lo) & ~np.isnan(la[0])
        if sel.sum() < 16:
            continue
        fit = classify_tail(np.log(np.abs(x[sel])), la[0][sel], cfg, lower=True)
        if fit.kind in ("vanishing", "super_decay") or (fit.kind == "polynomial" and fit.slope < -2 * t_max - cfg.slope_tol):
            xs = x[sel]
            idx = np.linspace(len(xs) // 2, len(xs) - 1, 8).astype(int)
            return {"side": side, "tail": fit.to_dict(),
                    "points": [{"x": _r(xs[i]), "log_abs_dphi": _r(la[0][sel][i])} for i in idx]}
    return None


# ---------------------------------------------------------------------------
# decision


def decide(phi, assumptions: AssumptionSet | None = None, cfg: Config = DEFAULT, f_candidate=None) -> ClosedRangeVerdict:
    assumptions = assumptions or AssumptionSet()
    rep = analyze_symbol(phi, cfg.max_order, cfg)
    sym = rep.symbol
    if not sym.ok:
        raise NotASymbolError(f"phi is not a symbol ({sym.status.value}: {sym.reason}); C_phi does not act on S(R)")
    dphi = differentiate(phi, 1)
    surj = rep.surjective
    resolved: dict[str, str] = {}

    # assumptions
    cinf_v = None
    if assumptions.cinf_closed_range == "auto":
        cinf_v = cinf_heuristic(phi, cfg)
        resolved["cinf_closed_range"] = "yes" if cinf_v.ok else "unknown"
    else:
        resolved["cinf_closed_range"] = assumptions.cinf_closed_range
    if assumptions.derivative_eventually_nonvanishing == "auto":
        scan = find_zeros(dphi, FULL, cfg=cfg)
        resolved["derivative_eventually_nonvanishing"] = "yes" if scan.complete else "unknown"
    else:
        resolved["derivative_eventually_nonvanishing"] = assumptions.derivative_eventually_nonvanishing

    trace: list[RuleRecord] = []
    witness = None

    # nec-cinf
    prem = {"cinf_closed_range": resolved["cinf_closed_range"]}
    if cinf_v is not None:
        prem["cinf_heuristic"] = cinf_v.to_dict()
    fired = resolved["cinf_closed_range"] == "no"
    trace.append(RuleRecord("nec-cinf", fired, "NotClosed" if fired else None, prem,
                            "C^oo closed range denied by assumption" if fired else ""))
    if fired:
        witness = {"rule": "nec-cinf", "failed_condition": "closed range on C^oo(R)"}

    # nec-growth
    prem = {"surjective": surj.to_dict(),
            "derivative_eventually_nonvanishing": resolved["derivative_eventually_nonvanishing"]}
    fired, detail = False, ""
    if surj.ok and resolved["derivative_eventually_nonvanishing"] == "yes":
        prem["om"] = rep.om.to_dict()
        if rep.om.failed:
            fired, detail = True, "phi is not in O_M"
            witness = witness or {"rule": "nec-growth", "failed_condition": "phi in O_M", "points": rep.om.witness}
        else:
            lb = _lower_bound_fails(dphi, cfg)
            prem["lower_bound"] = lb or "not refuted"
            if lb is not None:
                fired, detail = True, "|phi'| decays faster than every c(1+x^2)^-T"
                witness = witness or {"rule": "nec-growth", "failed_condition": "|phi'| >= c(1+x^2)^-T", **lb}
    trace.append(RuleRecord("nec-growth", fired, "NotClosed" if fired else None, prem, detail))

    # asterisco
    prem = {"surjective": surj.to_dict(), "condition_star": rep.star.to_dict()}
    fired, detail = False, ""
    if surj.ok and rep.star.ok:
        cands = [f_candidate] if f_candidate is not None else [parse(DEFAULT_CANDIDATE), parse(REFLECTED_CANDIDATE)]
        tried = []
        for f in cands:
            mf = membership_S(f, cfg.max_order, FULL, cfg)
            mc = membership_S(Composition(f, phi), cfg.max_order, FULL, cfg)
            tried.append({"candidate": f.to_text() if hasattr(f, "to_text") else str(f),
                          "membership_f": mf.status.value, "membership_f_o_phi": mc.status.value})
            if mf.failed and mc.ok:
                fired = True
                detail = "f o phi passes the S-membership test while f fails it"
                witness = witness or {"rule": "asterisco", "f": tried[-1]["candidate"], "f_witness": mf.witness[:4]}
                break
        prem["candidates"] = tried
    trace.append(RuleRecord("asterisco", fired, "NotClosed" if fired else None, prem, detail))

    if any(r.fired for r in trace):
        for rule in RULE_ORDER[3:]:
            trace.append(RuleRecord(rule, False, None, {}, "skipped: a necessary condition already failed", False))
        return ClosedRangeVerdict("NotClosed", trace, witness, resolved)

    # suf-om
    prem = {"om": rep.om.status.value, "is_symbol": sym.status.value}
    fired = False
    if rep.om.ok:
        res = closed_range_multiplier(dphi, FULL, cfg)
        prem["multiplier_dphi"] = res.to_dict()
        fired = res.verdict.ok
    trace.append(RuleRecord("suf-om", fired, "Closed" if fired else None, prem))

    cinf_yes = resolved["cinf_closed_range"] == "yes"
    cands = _halfline_candidates(phi, cfg)

    # suf-nonsurj
    prem = {"surjective": surj.status.value, "cinf_closed_range": resolved["cinf_closed_range"]}
    fired, detail = False, ""
    if surj.failed and cinf_yes:
        res, tried = _first_closed(dphi, cands[1] + cands[-1], cfg)
        prem["intervals_tried"] = tried
        if res is not None:
            fired, detail = True, f"I = {res.region.to_text()}"
            prem["multiplier_dphi_on_I"] = res.to_dict()
    trace.append(RuleRecord("suf-nonsurj", fired, "Closed" if fired else None, prem, detail))

    # suf-surj
    prem = {"surjective": surj.status.value, "cinf_closed_range": resolved["cinf_closed_range"]}
    fired, detail = False, ""
    if surj.ok and cinf_yes:
        r_right, t_right = _first_closed(dphi, cands[1], cfg)
        prem["right_tried"] = t_right
        if r_right is not None:
            r_left, t_left = _first_closed(dphi, cands[-1], cfg)
            prem["left_tried"] = t_left
            if r_left is not None:
                fired = True
                detail = f"I1 = {r_left.region.to_text()}, I2 = {r_right.region.to_text()}"
                prem["multiplier_I1"] = r_left.to_dict()
                prem["multiplier_I2"] = r_right.to_dict()
    trace.append(RuleRecord("suf-surj", fired, "Closed" if fired else None, prem, detail))

    status = "Closed" if any(r.fired for r in trace) else "Inconclusive"
    advisory = []
    if resolved["derivative_eventually_nonvanishing"] == "yes" and status == "Closed":
        advisory.append("phi' != 0 for large |x|: the range has codimension at most 1 on suitable half-lines "
                        "(recorded, not computed)")
    return ClosedRangeVerdict(status, trace, None, resolved, advisory)
