"""Is phi a symbol for S(R)?  Growth checks on phi and its derivatives.

Three growth conditions decide the question:

* ``|phi(x)| -> oo`` as ``|x| -> oo``;
* (i)  ``|phi^(j)| <= C (1 + phi^2)^p`` for every j;
* (ii) ``|phi(x)| >= |x|^(1/k)`` for ``|x| >= k``.

Polynomials and ``Q * exp(P)`` forms go through exact degree arithmetic.
Everything else is judged from log-domain samples: the base grid up to
``x_max`` plus far probes ``x = +-exp(t)``, ``t <= far_t_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import sympy as sp
from scipy.optimize import brentq

from .config import DEFAULT, Config
from .expr import X, PiecewiseFn, Points, smoothness_check
from .faa_di_bruno import Composition, fdb_terms
from .numeric import FULL, Region, base_grid, block_envelope, classify_tail, far_logs, golden_max, log1p_x2
from .verdict import Status, Verdict, conjunction


class NotSmoothError(ValueError):
    pass


def _r(v) -> float | str:
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    return float(f"{v:.12g}")


def _ceil_sig(v: float, digits: int = 6) -> float:
    """Round a positive bound up to ``digits`` significant digits."""
    if v <= 0 or not math.isfinite(v):
        return v
    e = math.floor(math.log10(v)) - digits + 1
    m = math.ceil(v / 10.0**e * (1 + 1e-12))
    return float(f"{m}e{e}")


# ---------------------------------------------------------------------------
# sampling (cached on the function object)


def _cache(f) -> dict:
    return getattr(f, "_cache", None) if isinstance(getattr(f, "_cache", None), dict) else {}


def grid_samples(f, order: int, cfg: Config = DEFAULT, region: Region = FULL):
    """Base grid ``x`` with sign/log arrays of derivatives ``0..order``."""
    cache = _cache(f)
    key = ("grid", order, cfg, region)
    for o in range(order, order + 8):
        hit = cache.get(("grid", o, cfg, region))
        if hit is not None:
            x, s, la = hit
            return x, s[: order + 1], la[: order + 1]
    x = base_grid(cfg, region)
    with np.errstate(invalid="ignore"):
        s, la = f.log_derivs(x, order)
    cache[key] = (x, s, la)
    return x, s, la


def far_samples(f, side: int, cfg: Config = DEFAULT, order: int = 0):
    """Far probes ``x = side*exp(t)``: returns ``t`` and sign/log arrays."""
    cache = _cache(f)
    key = ("far", side, order, cfg)
    if key not in cache:
        t = far_logs(cfg, 1.0)
        pts = Points.from_log(np.full(len(t), float(side)), t)
        s, la = f.log_derivs(pts, order)
        cache[key] = (t, s, la)
    return cache[key]


def _side_logs(f, side: int, cfg: Config):
    """(t = log|x|, log|f|, sign f) for |x| >= 1 on one side, base grid then far probes."""
    x, s, la = grid_samples(f, 0, cfg)
    sel = (np.sign(x) == side) & (np.abs(x) >= 1.0)
    order = np.argsort(np.abs(x[sel]), kind="stable")
    t1, l1, s1 = np.log(np.abs(x[sel]))[order], la[0, sel][order], s[0, sel][order]
    t2, s2, l2 = far_samples(f, side, cfg)
    keep = t2 > t1.max() if len(t1) else np.ones_like(t2, bool)
    t = np.concatenate([t1, t2[keep]])
    L = np.concatenate([l1, l2[0, keep]])
    S = np.concatenate([s1, s2[0, keep]])
    return t, L, S


# ---------------------------------------------------------------------------
# exact growth classes


def restrict_to(f, region: Region):
    """The single piece of ``f`` covering ``region``, as a one-piece function (else ``f``)."""
    if region.is_full or not isinstance(f, PiecewiseFn) or f.is_single:
        return f
    eps = 1e-12 * max(1.0, abs(region.lo if math.isfinite(region.lo) else region.hi))
    for p in f.pieces:
        plo, phi_ = float(p.lo), float(p.hi)
        if plo <= region.lo + eps and phi_ >= region.hi - eps:
            return PiecewiseFn.single(p.expr)
    return f


def as_polynomial(f) -> sp.Poly | None:
    if isinstance(f, PiecewiseFn) and f.is_single and f.is_polynomial():
        return sp.Poly(f.expr, X)
    return None


def as_exp_form(f) -> tuple[sp.Poly, sp.Poly] | None:
    """``(Q, P)`` with ``f = Q * exp(P)``, both rational polynomials and P non-constant."""
    if not (isinstance(f, PiecewiseFn) and f.is_single):
        return None
    e = sp.powsimp(f.expr)
    exps = [a for a in sp.Mul.make_args(e) if isinstance(a, sp.exp)]
    if len(exps) != 1:
        return None
    rest = sp.Mul(*[a for a in sp.Mul.make_args(e) if not isinstance(a, sp.exp)])
    P = exps[0].args[0]
    try:
        Pp, Qp = sp.Poly(P, X), sp.Poly(rest, X)
    except sp.PolynomialError:
        return None
    if not (P.is_polynomial(X) and rest.is_polynomial(X)):
        return None
    if not all(p.domain.is_ZZ or p.domain.is_QQ for p in (Pp, Qp)) or Pp.degree() < 1 or Qp.is_zero:
        return None
    return Qp, Pp


def _tends(poly: sp.Poly, side: int) -> int:
    """Sign of the limit of ``poly`` at ``side*oo`` (0 for constants)."""
    d = poly.degree()
    if d <= 0:
        return 0
    lc = poly.LC()
    return int(sp.sign(lc) * (side**d))


# ---------------------------------------------------------------------------
# limit at infinity and range


def _critical_values(poly: sp.Poly) -> list[float]:
    dp = poly.diff(X)
    if dp.degree() < 1:
        return []
    return [float(poly.eval(r).evalf(30)) for r in sp.real_roots(dp)]


def _global_extreme(phi, cfg: Config, lower: bool) -> tuple[float, float]:
    """Refined global min (``lower``) or max of phi over the base grid."""
    x, s, la = grid_samples(phi, 0, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        v = s[0] * np.exp(la[0])
    sgn = -1.0 if lower else 1.0
    w = np.where(np.isfinite(v), sgn * v, -np.inf)
    i = int(np.argmax(w))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
    t, val = golden_max(lambda t: sgn * float(phi.values(np.array([t]), 0)[0, 0]), float(lo), float(hi), 40)
    if val <= w[i]:
        t, val = float(x[i]), float(w[i])
    return sgn * val, t


@dataclass(frozen=True)
class RangeInfo:
    kind: str  # "R", "[a,inf)", "(-inf,b]"
    endpoint: float | None = None
    attained_at: float | None = None

    def to_dict(self):
        out = {"kind": self.kind}
        if self.endpoint is not None:
            out["endpoint"] = _r(self.endpoint)
            out["attained_at"] = _r(self.attained_at)
        return out


def _lemma1_side(phi, side: int, cfg: Config):
    t, L, S = _side_logs(phi, side, cfg)
    ok = ~np.isnan(L)
    t, L, S = t[ok], L[ok], S[ok]
    if len(t) < 16:
        return "unknown", None, None
    sm = np.minimum.accumulate(L[::-1])[::-1]
    q3 = int(np.searchsorted(t, t[0] + 0.75 * (t[-1] - t[0])))
    tail_sign = int(S[-1]) if S[-1] != 0 else int(np.sign(S[S != 0][-1])) if np.any(S != 0) else 0
    if sm[q3] > sm[0] + math.log(10.0) and np.all(S[q3:] == tail_sign):
        return "grows", tail_sign, float(sm[q3])
    return "bounded", tail_sign, None


def _cluster_value(phi, side: int, cfg: Config) -> float:
    t, L, S = _side_logs(phi, side, cfg)
    ok = ~np.isnan(L)
    t, L, S = t[ok], L[ok], S[ok]
    half = t >= np.median(t)
    i = int(np.argmin(np.where(half, L, np.inf)))
    with np.errstate(over="ignore"):
        v = float(S[i] * math.exp(L[i])) if L[i] < 700 else math.inf
    return round(v, 2) + 0.0


def _lemma1_points(phi, side: int, ell: float, count: int) -> list[dict[str, Any]]:
    """Points ``x_j`` on a tail with ``phi(x_j)`` at (or close to) ``ell``."""
    xs = side * np.arange(0.5, 200.0, 0.01)
    with np.errstate(invalid="ignore"):
        v = phi.values(xs, 0)[0] - ell
    roots = []
    for a, b, va, vb in zip(xs[:-1], xs[1:], v[:-1], v[1:]):
        if not (np.isfinite(va) and np.isfinite(vb)):
            continue
        if va == 0:
            roots.append(float(a))
        elif va * vb < 0:
            lo, hi = (a, b) if a < b else (b, a)
            roots.append(brentq(lambda z: float(phi.values(np.array([z]), 0)[0, 0]) - ell, lo, hi, xtol=1e-14))
        if len(roots) >= count:
            break
    out = []
    if len(roots) >= count:
        for r in roots:
            out.append({"x": _r(r), "phi": _r(float(phi.values(np.array([r]), 0)[0, 0])), "ell": ell})
    else:
        for j in range(1, count + 1):
            xv = float(side * j)
            out.append({"x": xv, "phi": _r(float(phi.values(np.array([xv]), 0)[0, 0])), "ell": ell})
    return out


def check_limit_infinity(phi, cfg: Config = DEFAULT, count: int = 8) -> tuple[Verdict, RangeInfo | None]:
    """``|phi| -> oo`` on both tails, plus the range classification when it does."""
    poly = as_polynomial(phi)
    if poly is not None:
        d = poly.degree()
        if d < 1:
            c = float(poly.as_expr())
            wit = [{"x": float(j), "phi": _r(c), "ell": _r(c)} for j in range(1, count + 1)]
            return Verdict.fails(wit, reason="constant function is bounded", ell=_r(c)), None
        signs = (_tends(poly, -1), _tends(poly, 1))
        cert = {"method": "exact", "degree": d, "tail_signs": list(signs)}
        if signs[0] != signs[1]:
            return Verdict.holds(cert), RangeInfo("R")
        cands = [(float(poly.eval(r).evalf(30)), float(r.evalf(30))) for r in sp.real_roots(poly.diff(X))]
        if signs[1] > 0:
            a, at = min(cands)
            return Verdict.holds(cert), RangeInfo("[a,inf)", a, at)
        b, at = max(cands)
        return Verdict.holds(cert), RangeInfo("(-inf,b]", b, at)
    if isinstance(phi, PiecewiseFn) and not phi.is_single:
        sm = smoothness_check(phi, cfg.max_order + 1, cfg.tol)
        if sm.failed:
            raise NotSmoothError(f"phi is not smooth: {sm.witness[0]}")
    res = {side: _lemma1_side(phi, side, cfg) for side in (-1, 1)}
    for side in (1, -1):
        if res[side][0] == "bounded":
            ell = _cluster_value(phi, side, cfg)
            wit = _lemma1_points(phi, side, ell, count)
            return Verdict.fails(wit, reason=f"|phi| stays bounded along x -> {'+' if side > 0 else '-'}oo",
                                 ell=ell, side=side), None
    if any(res[s][0] == "unknown" for s in (-1, 1)):
        return Verdict.inconclusive("too few determinate samples on a tail"), None
    signs = (res[-1][1], res[1][1])
    cert = {"method": "sampled", "tail_signs": list(signs),
            "log_min_last_quarter": {"-": _r(res[-1][2]), "+": _r(res[1][2])}}
    if signs[0] != signs[1]:
        return Verdict.holds(cert), RangeInfo("R")
    if signs[1] > 0:
        a, at = _global_extreme(phi, cfg, lower=True)
        return Verdict.holds(cert), RangeInfo("[a,inf)", a, at)
    b, at = _global_extreme(phi, cfg, lower=False)
    return Verdict.holds(cert), RangeInfo("(-inf,b]", b, at)


def check_surjective(phi, cfg: Config = DEFAULT) -> Verdict:
    lim, rng = check_limit_infinity(phi, cfg)
    if not lim.ok:
        return Verdict.inconclusive("|phi| -> oo not established")
    if rng.kind == "R":
        return Verdict.holds({"range": "R", "reason": "opposite tail signs and continuity"})
    side = "below" if rng.kind.startswith("[") else "above"
    return Verdict.fails([{"bound": _r(rng.endpoint), "bounded": side, "attained_at": _r(rng.attained_at)}],
                         reason=f"range is {rng.kind} with endpoint {rng.endpoint:.12g}")


# ---------------------------------------------------------------------------
# exponent searches shared by (i), (*) and O_M


def _tail_select(x: np.ndarray, vals: np.ndarray, side: int, cfg: Config) -> np.ndarray:
    ok = (np.sign(x) == side) & ~np.isnan(vals)
    if not np.any(ok):
        return ok
    R = np.abs(x[ok]).max()
    lo = min(cfg.tail_lo, math.sqrt(R))
    return ok & (np.abs(x) >= lo)


def _bounded_above(x: np.ndarray, r: np.ndarray, sides, cfg: Config) -> tuple[bool, str]:
    for side in sides:
        sel = _tail_select(x, r, side, cfg)
        if sel.sum() < 16:
            return False, "few determinate tail samples"
        fit = classify_tail(np.log(np.abs(x[sel])), r[sel], cfg)
        st = fit.status(cfg.slope_tol)
        if st == "growing" or (st == "ambiguous" and not fit.end_slope <= cfg.slope_tol):
            return False, f"tail {st}"
    return True, ""


def _exponent_search(x, num, extra, base, lattice, sides, cfg: Config, name: str):
    """Least exponent ``e`` in ``lattice`` with ``num - extra - e*base`` bounded above.

    Returns ``("holds", e, logC)``, ``("fails", witness_points, reason)`` or
    ``("inconclusive", None, reason)``.
    """
    with np.errstate(invalid="ignore"):
        core = num - extra
    for e in lattice:
        with np.errstate(invalid="ignore"):
            r = core - e * base
        finite = r[~np.isnan(r)]
        if len(finite) == 0 or np.any(finite == np.inf):
            continue
        ok, _ = _bounded_above(x, r, sides, cfg)
        if ok:
            return "holds", e, float(finite.max())
    emax = lattice[-1]
    # required exponent along the tails
    wit = []
    growing = False
    for side in sides:
        with np.errstate(invalid="ignore", divide="ignore"):
            req = np.where(base > 0.5, core / base, np.nan)
        sel = _tail_select(x, req, side, cfg) & (base > 0.5)
        if sel.sum() < 16:
            continue
        lx, rq = np.log(np.abs(x[sel])), req[sel]
        pos = rq > 0
        if pos.sum() < 16:
            continue
        fit = classify_tail(lx[pos], np.log(rq[pos]), cfg)
        if fit.growing and np.nanmax(rq) > emax:
            growing = True
            xs = x[sel][pos]
            over = np.flatnonzero(rq[pos] > emax)
            for i in over[np.linspace(0, len(over) - 1, min(8, len(over))).astype(int)]:
                wit.append({"x": _r(xs[i]), "required_exponent": _r(rq[pos][i]),
                            "log_lhs": _r(num[sel][pos][i]), "log_rhs_at_max": _r(extra[sel][pos][i] + emax * base[sel][pos][i])})
    if growing and wit:
        return "fails", wit, f"{name}: required exponent grows without bound (exceeds {emax:g})"
    return "inconclusive", None, f"{name}: no exponent <= {emax:g} certified"


# ---------------------------------------------------------------------------
# condition (i)


def _ratio_sup(x, num, extra, base, e) -> float:
    with np.errstate(invalid="ignore"):
        r = num - extra - e * base
    r = r[~np.isnan(r)]
    return float(r.max()) if len(r) else -math.inf


def check_condition_i(phi, max_j: int | None = None, cfg: Config = DEFAULT) -> Verdict:
    """Per j: ``|phi^(j)| <= C (1 + phi^2)^p`` with (C, p) on the lattice ``p = 1..p_max``."""
    max_j = max_j or cfg.max_order
    if max_j < 1:
        raise ValueError("max_j must be >= 1")
    x, s, la = grid_samples(phi, max_j, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        base = np.logaddexp(0.0, 2.0 * la[0])
    zero = np.zeros_like(base)
    exact = as_polynomial(phi) is not None and as_polynomial(phi).degree() >= 1
    eform = as_exp_form(phi)
    per_j, method = {}, "exact" if (exact or eform is not None) else "sampled"
    for j in range(1, max_j + 1):
        if method == "exact":
            logC = _ratio_sup(x, la[j], zero, base, 1)
            per_j[str(j)] = {"C": _ceil_sig(math.exp(logC)) if logC > -math.inf else 0.0, "p": 1}
            continue
        kind, a, b = _exponent_search(x, la[j], zero, base, list(range(1, cfg.p_max + 1)), (-1, 1), cfg, f"j={j}")
        if kind == "holds":
            per_j[str(j)] = {"C": _ceil_sig(math.exp(b)) if b < 700 else math.inf, "p": a}
        elif kind == "fails":
            for w in a:
                w["j"] = j
            return Verdict.fails(a, reason=b, j=j, certified=per_j)
        else:
            return Verdict.inconclusive(b, certified=per_j)
    return Verdict.holds({"method": method, "per_j": per_j, "grid_points": int(len(x))})


def verify_condition_i(phi, certificate: dict, cfg: Config = DEFAULT) -> bool:
    """Re-check a condition (i) certificate at every stored grid point."""
    per_j = certificate["per_j"]
    x, s, la = grid_samples(phi, max(int(j) for j in per_j), cfg)
    base = np.logaddexp(0.0, 2.0 * la[0])
    for j, cp in per_j.items():
        lhs = la[int(j)]
        rhs = math.log(cp["C"]) + cp["p"] * base if cp["C"] > 0 else np.full_like(base, -np.inf)
        with np.errstate(invalid="ignore"):
            ok = np.isnan(lhs) | (lhs == -np.inf) | (lhs <= rhs + 1e-12 * np.maximum(1.0, np.abs(rhs)))
        if not np.all(ok):
            return False
    return True


# ---------------------------------------------------------------------------
# condition (ii)


def _poly_nonneg_beyond(P: sp.Poly, k: int) -> bool:
    """``P >= 0`` on ``[k, oo)`` (exact)."""
    if P.is_zero:
        return True
    if P.eval(k) < 0 or P.LC() < 0:
        return False
    for g, m in P.sqf_list()[1]:
        if m % 2 == 0:
            continue
        n = g.count_roots(k, None) - (1 if g.eval(k) == 0 else 0)
        if n > 0:
            return False
    return True


def _poly_condition_ii(poly: sp.Poly, cfg: Config) -> dict[str, Any]:
    d = poly.degree()
    for k in range(1, cfg.k_max + 1):
        if 2 * k * d > 120:
            break
        ok = True
        for side in (1, -1):
            q = sp.Poly(poly.as_expr().subs(X, side * X), X)
            P = q ** (2 * k) - sp.Poly(X**2, X)
            if not _poly_nonneg_beyond(P, k):
                ok = False
                break
        if ok:
            return {"k": k, "method": "exact"}
    coeffs = [abs(sp.Rational(c)) for c in poly.all_coeffs()]
    a, S = coeffs[0], sum(coeffs[1:])
    k = max(2, math.ceil(2 * S / a), math.ceil(4 / a**2))
    return {"k": int(k), "method": "exact-bound"}


def check_condition_ii(phi, cfg: Config = DEFAULT) -> Verdict:
    """Least k in ``1..k_max`` with ``|phi(x)| >= |x|^(1/k)`` for ``|x| >= k``."""
    poly = as_polynomial(phi)
    if poly is not None:
        if poly.degree() < 1:
            c = abs(float(poly.as_expr()))
            wit = [{"x": _r(v), "log_phi": _r(math.log(c)) if c else "-inf", "log_x_over_k": _r(math.log(v) / cfg.k_max)}
                   for v in (math.exp(4 * j) if c > 0 else float(j + 64) for j in range(1, 9))]
            return Verdict.fails(wit, reason="constant cannot dominate |x|^(1/k)")
        return Verdict.holds(_poly_condition_ii(poly, cfg))
    sides = {side: _side_logs(phi, side, cfg) for side in (-1, 1)}
    for side, (t, L, _) in sides.items():
        if (~np.isnan(L)).sum() < 16:
            return Verdict.inconclusive("too few determinate samples on a tail")
    for k in range(1, cfg.k_max + 1):
        ok = True
        for t, L, _ in sides.values():
            sel = (t >= math.log(k)) & ~np.isnan(L)
            if np.any(L[sel] < t[sel] / k):
                ok = False
                break
        if ok:
            stable = True
            for t, L, _ in sides.values():
                sel = ~np.isnan(L) & (t > 0)
                e = L[sel] / t[sel]
                q = max(4, len(e) // 4)
                if e[-q:].min() < 1.0 / k:
                    stable = False
            if stable:
                return Verdict.holds({"k": k, "method": "sampled", "far_t_max": cfg.far_t_max})
            return Verdict.inconclusive(f"k={k} passes the grid but log|phi|/log|x| approaches 1/k")
    wit = []
    decreasing = False
    for side, (t, L, _) in sides.items():
        sel = ~np.isnan(L) & (t > 0)
        ts, Ls = t[sel], L[sel]
        e = Ls / ts
        half = len(e) // 2
        viol = np.flatnonzero(Ls < ts / cfg.k_max)
        if len(viol) and e[-1] < 1.0 / cfg.k_max and e[-1] < e[half]:
            decreasing = True
            for i in viol[np.linspace(0, len(viol) - 1, min(8, len(viol))).astype(int)]:
                wit.append({"x": f"{'-' if side < 0 else ''}exp({ts[i]:.6g})", "log_x": _r(ts[i]), "log_phi": _r(Ls[i]),
                            "log_ratio_at_kmax": _r(cfg.k_max * Ls[i] - ts[i])})
    if decreasing and wit:
        return Verdict.fails(wit, reason=f"|phi|^k/|x| -> 0 for every tested k <= {cfg.k_max}")
    return Verdict.inconclusive(f"no k <= {cfg.k_max} certified")


# ---------------------------------------------------------------------------
# condition (*) and O_M


def check_condition_star(phi, max_j: int | None = None, cfg: Config = DEFAULT) -> Verdict:
    """Per j: ``|phi^(j)| <= C_j (1+x^2)^q_j (1 + |phi|)`` with ``q_j`` in ``0..q_max``."""
    max_j = max_j or cfg.max_order
    if max_j < 1:
        raise ValueError("max_j must be >= 1")
    x, s, la = grid_samples(phi, max_j, cfg)
    with np.errstate(invalid="ignore"):
        extra = np.logaddexp(0.0, la[0])
    base = log1p_x2(x)
    poly, eform = as_polynomial(phi), as_exp_form(phi)
    per_j = {}
    for j in range(1, max_j + 1):
        q = None
        if poly is not None:
            q = 0
        elif eform is not None:
            Q, P = eform
            up = any(_tends(P, sd) > 0 for sd in (-1, 1))
            Rj = sp.Poly(sp.simplify(sp.diff(phi.expr, X, j) * sp.exp(-P.as_expr())), X)
            q = max(0, math.ceil((Rj.degree() - Q.degree()) / 2)) if up else 0
        if q is not None:
            logC = _ratio_sup(x, la[j], extra, base, q)
            per_j[str(j)] = {"C": _ceil_sig(math.exp(logC)) if logC > -math.inf else 0.0, "q": q, "method": "exact"}
            continue
        kind, a, b = _exponent_search(x, la[j], extra, base, list(range(0, cfg.q_max + 1)), (-1, 1), cfg, f"j={j}")
        if kind == "holds":
            per_j[str(j)] = {"C": _ceil_sig(math.exp(b)) if b < 700 else math.inf, "q": a, "method": "sampled"}
        elif kind == "fails":
            for w in a:
                w["j"] = j
            return Verdict.fails(a, reason=b, j=j, certified=per_j)
        else:
            return Verdict.inconclusive(b, certified=per_j)
    return Verdict.holds({"per_j": per_j, "grid_points": int(len(x))})


def check_om(F, max_j: int | None = None, cfg: Config = DEFAULT, region: Region = FULL) -> Verdict:
    """Multiplier test: every ``F^(k)``, ``k <= max_j``, grows at most polynomially on ``region``."""
    max_j = max_j if max_j is not None else cfg.max_order
    sides = region.sides()
    F = restrict_to(F, region)
    poly, eform = as_polynomial(F), as_exp_form(F)
    if eform is not None:
        Q, P = eform
        bad = [sd for sd in sides if _tends(P, sd) > 0]
        if bad:
            sd = bad[0]
            wit = []
            for v in np.geomspace(10.0, 1e4, 8):
                xv = sd * float(v)
                lv = float(F.log_derivs(np.array([xv]), 0)[1][0, 0])
                wit.append({"x": _r(xv), "k": 0, "log_abs": _r(lv), "log_abs_over_log_x": _r(lv / math.log(v))})
            return Verdict.fails(wit, reason="exp of a polynomial unbounded above: super-polynomial growth")
    x, s, la = grid_samples(F, max_j, cfg, region)
    base = log1p_x2(x)
    zero = np.zeros_like(base)
    per_k = {}
    for k in range(0, max_j + 1):
        q = None
        if poly is not None:
            q = max(0, math.ceil((poly.degree() - k) / 2))
        elif eform is not None:
            q = 0
        if q is not None:
            logC = _ratio_sup(x, la[k], zero, base, q)
            per_k[str(k)] = {"C": _ceil_sig(math.exp(logC)) if logC > -math.inf else 0.0, "q": q, "method": "exact"}
            continue
        kind, a, b = _exponent_search(x, la[k], zero, base, list(range(0, cfg.q_max + 1)), sides, cfg, f"k={k}")
        if kind == "holds":
            per_k[str(k)] = {"C": _ceil_sig(math.exp(b)) if b < 700 else math.inf, "q": a, "method": "sampled"}
            continue
        # super-polynomial growth of the derivative itself
        for sd in sides:
            sel = _tail_select(x, la[k], sd, cfg)
            if sel.sum() < 16:
                continue
            fit = classify_tail(np.log(np.abs(x[sel])), la[k][sel], cfg)
            if fit.kind == "super_growth" or (fit.kind == "polynomial" and fit.slope > 2 * cfg.q_max + 1):
                xs, ls = x[sel], la[k][sel]
                idx = np.linspace(len(xs) // 2, len(xs) - 1, 8).astype(int)
                wit = [{"x": _r(xs[i]), "k": k, "log_abs": _r(ls[i]), "log_abs_over_log_x": _r(ls[i] / math.log(abs(xs[i])))}
                       for i in idx]
                return Verdict.fails(wit, reason=f"F^({k}) grows super-polynomially", k=k, certified=per_k)
        return Verdict.inconclusive(b if kind == "inconclusive" else f"k={k}: undecided", certified=per_k)
    return Verdict.holds({"per_k": per_k, "region": region.to_text()})


# ---------------------------------------------------------------------------
# symbol test and continuity estimate


def is_symbol(phi, max_j: int | None = None, cfg: Config = DEFAULT) -> Verdict:
    lim, _ = check_limit_infinity(phi, cfg)
    parts = {"lemma1": lim, "condition_i": check_condition_i(phi, max_j, cfg), "condition_ii": check_condition_ii(phi, cfg)}
    return conjunction(parts)


@dataclass(frozen=True)
class ContinuityBound:
    """``pi_n(f o phi) <= factor * pi_index(f)`` with ``index = k*n + t``."""

    n: int
    k: int
    t: int
    index: int
    factor: float
    M: float
    C: float

    def to_dict(self):
        return {"n": self.n, "k": self.k, "t": self.t, "index": self.index, "factor": _r(self.factor),
                "M": _r(self.M), "C": _r(self.C)}


def continuity_estimate(phi, n: int, cfg: Config = DEFAULT, cond_i: Verdict | None = None,
                        cond_ii: Verdict | None = None) -> ContinuityBound:
    """Seminorm index and factor from the (i)/(ii) certificates via the chain rule."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cond_i = cond_i or check_condition_i(phi, max(n, 1), cfg)
    cond_ii = cond_ii or check_condition_ii(phi, cfg)
    if not (cond_i.ok and cond_ii.ok):
        raise ValueError("continuity estimate needs certificates for conditions (i) and (ii)")
    per_j = cond_i.certificate["per_j"]
    if any(str(j) not in per_j for j in range(1, n + 1)):
        raise ValueError(f"condition (i) certificate missing orders up to {n}")
    k = int(cond_ii.certificate["k"])
    Cj = {j: float(per_j[str(j)]["C"]) for j in range(1, n + 1)}
    pj = {j: int(per_j[str(j)]["p"]) for j in range(1, n + 1)}
    t = n + 1
    M = 1.0
    for j in range(1, n + 1):
        by_l: dict[int, float] = {}
        for term in fdb_terms(j):
            kk = term.partition.k
            t = max(t, sum(ki * pj[i] for i, ki in enumerate(kk, start=1)))
            w = float(term.coefficient) * math.prod(Cj[i] ** ki for i, ki in enumerate(kk, start=1))
            by_l[term.partition.k_total] = by_l.get(term.partition.k_total, 0.0) + w
        M = max(M, max(by_l.values()))
    C = float((1 + k * k) ** n)
    return ContinuityBound(n, k, t, k * n + t, n * M * C, M, C)


@dataclass
class SymbolReport:
    lemma1: Verdict
    cond_i: Verdict
    cond_ii: Verdict
    star: Verdict
    om: Verdict
    range: RangeInfo | None
    surjective: Verdict
    continuity: list[ContinuityBound] = field(default_factory=list)

    @property
    def symbol(self) -> Verdict:
        return conjunction({"lemma1": self.lemma1, "condition_i": self.cond_i, "condition_ii": self.cond_ii})

    def to_dict(self) -> dict[str, Any]:
        return {"is_symbol": self.symbol.to_dict(), "lemma1": self.lemma1.to_dict(), "condition_i": self.cond_i.to_dict(),
                "condition_ii": self.cond_ii.to_dict(), "condition_star": self.star.to_dict(), "om": self.om.to_dict(),
                "range": None if self.range is None else self.range.to_dict(), "surjective": self.surjective.to_dict(),
                "continuity": [c.to_dict() for c in self.continuity]}


def analyze_symbol(phi, max_j: int | None = None, cfg: Config = DEFAULT) -> SymbolReport:
    max_j = max_j or cfg.max_order
    lim, rng = check_limit_infinity(phi, cfg)
    ci = check_condition_i(phi, max_j, cfg)
    cii = check_condition_ii(phi, cfg)
    star = check_condition_star(phi, max_j, cfg)
    om = check_om(phi, max_j, cfg)
    if lim.ok:
        surj = (Verdict.holds({"range": "R", "reason": "opposite tail signs and continuity"}) if rng.kind == "R" else
                Verdict.fails([{"bound": _r(rng.endpoint), "bounded": "below" if rng.kind.startswith("[") else "above",
                                "attained_at": _r(rng.attained_at)}], reason=f"range is {rng.kind}"))
    else:
        surj = Verdict.inconclusive("|phi| -> oo not established")
    cont = []
    if lim.ok and ci.ok and cii.ok:
        cont = [continuity_estimate(phi, n, cfg, ci, cii) for n in range(1, max_j + 1)]
    return SymbolReport(lim, ci, cii, star, om, rng, surj, cont)


def verify_continuity(phi, bound: ContinuityBound, f, cfg: Config = DEFAULT) -> tuple[float, float]:
    """Both sides of ``pi_n(f o phi) <= factor * pi_index(f)`` (seminorm lower bounds)."""
    from .norms import seminorm_pi

    lhs = seminorm_pi(Composition(f, phi), bound.n, FULL, cfg).log_value
    rhs = math.log(bound.factor) + seminorm_pi(f, bound.index, FULL, cfg).log_value
    return lhs, rhs
