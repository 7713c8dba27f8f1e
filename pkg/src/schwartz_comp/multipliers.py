"""Closed range of multiplication operators ``f -> F*f`` on S(R) and on S(I).

``M_F`` has closed range when F is a multiplier and there are N, T, c > 0 with,
for every x (in I):

(a) fewer than N zeros of F (with multiplicity) in ``I_{x,T}``;
(b) ``(1+x^2)^T |F(x)| > c * prod |x - x_i|`` over those zeros
    (just ``c`` when there are none),

where ``I_{x,T} = [x - (1+x^2)^-T, x + (1+x^2)^-T]`` (intersected with I).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import sympy as sp
from scipy.optimize import brentq

from .config import DEFAULT, Config
from .expr import X, PiecewiseFn
from .numeric import FULL, Region, base_grid, classify_tail, log1p_x2
from .symbols import _r, as_exp_form, as_polynomial, check_om, restrict_to
from .verdict import Verdict


@dataclass(frozen=True)
class ZeroCluster:
    location: float
    multiplicity: int
    isolation_radius: float
    exact: str | None = None
    endpoint: bool = False

    def to_dict(self) -> dict[str, Any]:
        out = {"location": _r(self.location), "multiplicity": self.multiplicity,
               "isolation_radius": _r(self.isolation_radius)}
        if self.exact is not None:
            out["exact"] = self.exact
        if self.endpoint:
            out["endpoint"] = True
        return out


@dataclass(frozen=True)
class ZeroScan:
    zeros: tuple[ZeroCluster, ...]
    complete: bool
    method: str
    note: str = ""

    def to_dict(self):
        return {"zeros": [z.to_dict() for z in self.zeros], "complete": self.complete, "method": self.method,
                "note": self.note}


@dataclass(frozen=True)
class ClosedRangeParams:
    N: int
    T: float
    c: float

    def __post_init__(self) -> None:
        if not (self.N > 0 and self.T > 0 and self.c > 0):
            raise ValueError("N, T, c must be positive")

    def to_dict(self):
        return {"N": self.N, "T": self.T, "c": self.c}


def _isolate(locs: list[tuple[float, int, str | None]], region: Region) -> tuple[ZeroCluster, ...]:
    locs = sorted(locs)
    out = []
    for i, (z, m, ex) in enumerate(locs):
        gaps = [abs(z - locs[k][0]) for k in (i - 1, i + 1) if 0 <= k < len(locs)]
        rad = min(gaps) / 2 if gaps else 1.0
        at_end = any(math.isfinite(b) and abs(z - b) <= 1e-12 * max(1.0, abs(b)) for b in (region.lo, region.hi))
        out.append(ZeroCluster(z, m, rad, ex, at_end))
    return tuple(out)


def _in_region(z: float, region: Region) -> bool:
    eps = 1e-12 * max(1.0, abs(z))
    return region.lo - eps <= z <= region.hi + eps


def _poly_zeros(poly: sp.Poly, region: Region) -> list[tuple[float, int, str | None]]:
    out = []
    for g, m in poly.sqf_list()[1]:
        if g.degree() == 1:
            r = -g.nth(0) / g.nth(1)
            out.append((float(r), m, str(sp.Rational(r))))
            continue
        for (a, b), _ in g.intervals(eps=sp.Rational(1, 10**15)):
            out.append((float((a + b) / 2), m, None))
    return [z for z in out if _in_region(z[0], region)]


def _multiplicity(F, z: float, max_mult: int) -> int:
    _, la = F.log_derivs(np.array([z]), max_mult + 1)
    # scale from the derivatives' size one unit away
    _, la_near = F.log_derivs(np.array([z - 0.5, z + 0.5]), max_mult + 1)
    for m in range(1, max_mult + 2):
        scale = np.nanmax(la_near[: m + 1])
        if np.isfinite(la[m, 0]) and la[m, 0] > scale + math.log(1e-7):
            return m
    return max_mult + 1


def _exact_piece(expr) -> sp.Poly | None:
    """Polynomial whose real zeros are those of ``expr`` (None if not an exact class)."""
    g = PiecewiseFn.single(expr)
    poly = as_polynomial(g)
    if poly is not None:
        return poly
    eform = as_exp_form(g)
    if eform is not None:
        return eform[0]
    # polynomial with constant (e.g. e-dependent) coefficients: rationalize at 40 digits
    if expr.is_polynomial(X) and not expr.free_symbols - {X}:
        coeffs = [sp.Rational(str(sp.N(c, 40))) for c in sp.Poly(expr, X).all_coeffs()]
        return sp.Poly(coeffs, X)
    return None


def _piecewise_exact_zeros(F: PiecewiseFn, region: Region):
    """Zeros piece by piece when every piece meeting ``region`` is an exact class."""
    locs: list[tuple[float, int, str | None]] = []
    for p in F.pieces:
        plo, phi_ = float(p.lo), float(p.hi)
        if phi_ < region.lo or plo > region.hi:
            continue
        poly = _exact_piece(p.expr)
        if poly is None:
            return None
        if poly.is_zero:
            return "vanishes"
        for z, m, ex in _poly_zeros(poly, region):
            inside = (plo < z < phi_) or (z == plo and p.lo_closed) or (z == phi_ and p.hi_closed)
            if inside and not any(abs(z - q[0]) <= 1e-12 * max(1.0, abs(z)) for q in locs):
                locs.append((z, m, ex))
    return locs


def find_zeros(F, region: Region = FULL, max_multiplicity: int | None = None, cfg: Config = DEFAULT) -> ZeroScan:
    """Real zeros of F on ``region`` with multiplicities."""
    max_mult = max_multiplicity or cfg.max_multiplicity
    G = restrict_to(F, region)
    poly = as_polynomial(G)
    if poly is not None:
        if poly.is_zero:
            return ZeroScan((), False, "exact", "F vanishes identically")
        return ZeroScan(_isolate(_poly_zeros(poly, region), region), True, "exact")
    eform = as_exp_form(G)
    if eform is not None:
        return ZeroScan(_isolate(_poly_zeros(eform[0], region), region), True, "exact")
    if isinstance(G, PiecewiseFn) and not G.is_single:
        locs = _piecewise_exact_zeros(G, region)
        if locs == "vanishes":
            return ZeroScan((), False, "exact", "F vanishes on a piece")
        if locs is not None:
            return ZeroScan(_isolate(locs, region), True, "exact-piecewise")
    lo, hi = region.clip(-cfg.zero_window, cfg.zero_window)
    xs = np.linspace(lo, hi, int(round((hi - lo) / 1e-2)) + 1)
    v = F.values(xs, 1)
    f0, f1 = v[0], v[1]
    if np.any(np.convolve((f0 == 0).astype(int), np.ones(3, int), "valid") == 3):
        return ZeroScan((), False, "sampled", "F vanishes on an interval")

    def f(z):
        return float(F.values(np.array([z]), 0)[0, 0])

    def df(z):
        return float(F.values(np.array([z]), 1)[1, 0])

    found: list[float] = []
    for i in np.flatnonzero(f0 == 0):
        found.append(float(xs[i]))
    sc = np.flatnonzero(np.sign(f0[:-1]) * np.sign(f0[1:]) < 0)
    for i in sc:
        found.append(brentq(f, xs[i], xs[i + 1], xtol=1e-15))
    # touching zeros: extrema of F where |F| is negligible
    ext = np.flatnonzero(np.sign(f1[:-1]) * np.sign(f1[1:]) < 0)
    for i in ext:
        z = brentq(df, xs[i], xs[i + 1], xtol=1e-15)
        near = np.abs(f0[max(i - 50, 0): i + 50])
        if abs(f(z)) <= 1e-12 * max(1.0, float(np.nanmax(near))):
            found.append(z)
    found.sort()
    merged: list[float] = []
    for z in found:
        if not merged or abs(z - merged[-1]) > 1e-9 * max(1.0, abs(z)):
            merged.append(z)
    locs = []
    for z in merged:
        m = _multiplicity(F, z, max_mult)
        if m > max_mult:
            return ZeroScan((), False, "sampled", f"multiplicity above {max_mult} suspected at x={z:.12g}")
        locs.append((z, m, None))
    # beyond the window: look for sign changes on the base grid
    x = base_grid(cfg, region)
    out = x[(x < lo) | (x > hi)]
    note = f"scanned [{lo:g}, {hi:g}]"
    complete = True
    if len(out):
        s = np.sign(F.values(out, 0)[0])
        for part in (out[out < lo], out[out > hi]):
            if len(part) > 1:
                sp_ = np.sign(F.values(part, 0)[0])
                if np.any(sp_[:-1] * sp_[1:] <= 0):
                    complete = False
        note += "; no sign change on samples beyond" if complete else "; sign changes beyond the window"
    return ZeroScan(_isolate(locs, region), complete, "sampled", note)


def interval_IxT(x: float, T: float, region: Region = FULL) -> tuple[float, float]:
    if T <= 0:
        raise ValueError("T must be positive")
    r = (1.0 + x * x) ** (-T)
    return max(x - r, region.lo), min(x + r, region.hi)


# ---------------------------------------------------------------------------
# conditions (a) and (b)


def ab_samples(F, zeros: ZeroScan, T_values, region: Region = FULL, cfg: Config = DEFAULT) -> np.ndarray:
    """Base grid plus dense points near zeros and where a zero enters/leaves ``I_{x,T}``."""
    pts = [base_grid(cfg, region)]
    near = np.geomspace(1e-6, 1.0, 64)
    for z in zeros.zeros:
        pts += [z.location - near, z.location + near]
        for T in T_values:
            for sgn in (-1.0, 1.0):
                g = lambda x: sgn * (x - z.location) - (1.0 + x * x) ** (-T)
                a, b = (z.location, z.location + 2.0) if sgn > 0 else (z.location - 2.0, z.location)
                try:
                    xb = brentq(g, a, b, xtol=1e-15)
                except ValueError:
                    continue
                pts.append(xb + np.array([-1e-9, 1e-9, -1e-6, 1e-6]))
    x = np.unique(np.concatenate(pts))
    x = x[region.contains(x)]
    zl = np.array([z.location for z in zeros.zeros])
    if len(zl):
        x = x[np.min(np.abs(x[:, None] - zl[None, :]), axis=1) > 1e-12]
    return x


def _ab_terms(F, x: np.ndarray, zeros: ZeroScan, T: float, region: Region):
    """(zero counts in I_{x,T}, margin log((1+x^2)^T |F| / prod|x - x_i|))."""
    _, la = F.log_derivs(x, 0)
    logF = la[0]
    r = (1.0 + x * x) ** (-T)
    lo = np.maximum(x - r, region.lo)
    hi = np.minimum(x + r, region.hi)
    counts = np.zeros(len(x), dtype=int)
    logprod = np.zeros(len(x))
    for z in zeros.zeros:
        inside = (z.location >= lo) & (z.location <= hi)
        counts += np.where(inside, z.multiplicity, 0)
        with np.errstate(divide="ignore"):
            logprod += np.where(inside, z.multiplicity * np.log(np.abs(x - z.location)), 0.0)
    with np.errstate(invalid="ignore"):
        margin = T * log1p_x2(x) + logF - logprod
    return counts, margin


def check_conditions_ab(F, params: ClosedRangeParams, region: Region = FULL, zeros: ZeroScan | None = None,
                        samples: np.ndarray | None = None, cfg: Config = DEFAULT) -> Verdict:
    zeros = zeros or find_zeros(F, region, cfg=cfg)
    if not zeros.complete:
        return Verdict.inconclusive(f"incomplete zero scan: {zeros.note}")
    x = samples if samples is not None else ab_samples(F, zeros, (params.T,), region, cfg)
    counts, margin = _ab_terms(F, x, zeros, params.T, region)
    bad_a = np.flatnonzero(counts >= params.N)
    if len(bad_a):
        i = bad_a[0]
        return Verdict.fails([{"x": _r(x[i]), "zeros_in_I": int(counts[i]), "N": params.N}],
                             reason="condition (a): too many zeros in I_{x,T}")
    logc = math.log(params.c)
    bad_b = np.flatnonzero(~(margin > logc))
    if len(bad_b):
        idx = bad_b[np.linspace(0, len(bad_b) - 1, min(8, len(bad_b))).astype(int)]
        return Verdict.fails([{"x": _r(x[i]), "log_lhs_over_prod": _r(margin[i]), "log_c": _r(logc)} for i in idx],
                             reason="condition (b): (1+x^2)^T |F| <= c prod|x - x_i|")
    return Verdict.holds({**params.to_dict(), "samples": int(len(x)), "min_log_margin": _r(margin.min()),
                          "max_zero_count": int(counts.max()) if len(counts) else 0})


@dataclass
class MultiplierResult:
    verdict: Verdict
    params: ClosedRangeParams | None
    zeros: ZeroScan | None
    region: Region
    samples: np.ndarray | None = field(default=None, repr=False)
    om: Verdict | None = None

    def samples_digest(self) -> str | None:
        if self.samples is None:
            return None
        return hashlib.sha256(np.ascontiguousarray(self.samples, dtype="<f8").tobytes()).hexdigest()[:16]

    def to_dict(self) -> dict[str, Any]:
        out = {"verdict": self.verdict.to_dict(), "region": self.region.to_text()}
        if self.params is not None:
            out["params"] = self.params.to_dict()
        if self.zeros is not None:
            out["zeros"] = self.zeros.to_dict()
        if self.samples is not None:
            out["samples"] = {"count": int(len(self.samples)), "sha256_16": self.samples_digest()}
        if self.om is not None:
            out["om"] = self.om.status.value
        return out

    def reverify(self, F, cfg: Config = DEFAULT) -> bool:
        """Re-check a Holds certificate pointwise on the stored samples."""
        if not self.verdict.ok:
            return False
        v = check_conditions_ab(F, self.params, self.region, self.zeros, self.samples, cfg)
        return v.ok


def _c_lattice(cfg: Config) -> list[float]:
    return [2.0**e for e in cfg.c_exponents]


def closed_range_multiplier(F, region: Region = FULL, cfg: Config = DEFAULT) -> MultiplierResult:
    """Search (N, T, c) in lattice order (T outer, then least N, then largest c)."""
    om = check_om(F, cfg.max_order, cfg, region)
    if om.failed:
        return MultiplierResult(Verdict.fails(om.witness, reason=f"not a multiplier: {om.reason}"), None, None, region,
                                om=om)
    zeros = find_zeros(F, region, cfg=cfg)
    if not zeros.complete:
        return MultiplierResult(Verdict.inconclusive(f"incomplete zero scan: {zeros.note}"), None, zeros, region, om=om)
    x = ab_samples(F, zeros, cfg.t_values, region, cfg)
    counts_all = {}
    for T in cfg.t_values:
        counts, margin = _ab_terms(F, x, zeros, T, region)
        counts_all[T] = counts
        N = int(counts.max()) + 1 if len(counts) else 1
        if N > cfg.n_max or np.any(np.isnan(margin)):
            continue
        low = float(margin.min())
        for c in _c_lattice(cfg):
            if low > math.log(c):
                params = ClosedRangeParams(N, T, c)
                v = check_conditions_ab(F, params, region, zeros, x, cfg)
                if v.ok and not om.ok:
                    v = Verdict.inconclusive(f"(a)/(b) certified with {params.to_dict()} but multiplier test undecided")
                return MultiplierResult(v, params if v.ok else None, zeros, region, x, om)
    # structural obstructions
    if all(int(c.max()) + 1 > cfg.n_max for c in counts_all.values() if len(c)):
        i = int(np.argmax(counts_all[cfg.t_values[0]]))
        return MultiplierResult(Verdict.fails([{"x": _r(x[i]), "zeros_in_I": int(counts_all[cfg.t_values[0]][i])}],
                                              reason="condition (a): zeros accumulate in I_{x,T} for every T"),
                                None, zeros, region, x, om)
    _, la = F.log_derivs(x, 0)
    t_max = max(cfg.t_values)
    for side in region.sides():
        sel = (np.sign(x) == side) & (np.abs(x) >= cfg.tail_lo)
        if sel.sum() < 16:
            continue
        fit = classify_tail(np.log(np.abs(x[sel])), la[0][sel], cfg)
        if fit.kind in ("vanishing", "super_decay") or (fit.kind == "polynomial" and fit.slope < -2 * t_max - 1
                                                         and fit.end_slope <= fit.slope + cfg.slope_tol):
            xs, ls = x[sel], la[0][sel]
            idx = np.linspace(len(xs) // 2, len(xs) - 1, 8).astype(int)
            wit = [{"x": _r(xs[i]), "log_abs_F": _r(ls[i]), "log_weighted_at_Tmax": _r(ls[i] + t_max * math.log1p(xs[i] ** 2))}
                   for i in idx]
            return MultiplierResult(Verdict.fails(wit, reason="condition (b): (1+x^2)^T |F| -> 0 on a tail for every T",
                                                  tail=fit.to_dict()), None, zeros, region, x, om)
    return MultiplierResult(Verdict.inconclusive("no (N, T, c) on the lattice and no structural obstruction"),
                            None, zeros, region, x, om)
