"""Schwartz seminorms, decay reports and S-membership evidence.

All weighted magnitudes ``(1+x^2)^m |f^(j)(x)|`` are handled as logs.
Derivative order 0 is included in every sup (see ``include_zero``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import DEFAULT, Config
from .numeric import FULL, Region, TailFit, base_grid, block_envelope, classify_tail, golden_max, local_peaks, log1p_x2
from .verdict import Verdict


class SupportLeakWarning(UserWarning):
    pass


def _point_log(f, j: int, t: float) -> float:
    _, la = f.log_derivs(np.array([t], dtype=float), j)
    v = la[j, 0]
    return -math.inf if math.isnan(v) else float(v)


def _fmt(v: float) -> float | str:
    if not math.isfinite(v):
        return str(v)
    return float(f"{v:.12g}")


@dataclass(frozen=True)
class SeminormEstimate:
    """Lower bound for ``sup_x sup_j (1+x^2)^n |f^(j)(x)|`` with its witness and tail verdict."""

    value: float
    log_value: float
    witness: tuple[float, int] | None
    tail_status: str
    n: int
    tails: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, Any] = field(default_factory=dict)

    def integrand(self, f) -> float:
        """Recompute the weighted value at the witness (log domain)."""
        if self.witness is None:
            return -math.inf
        x, j = self.witness
        return self.n * math.log1p(x * x) + _point_log(f, j, x)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "value": _fmt(self.value), "log_value": _fmt(self.log_value),
                "witness": None if self.witness is None else {"x": _fmt(self.witness[0]), "j": self.witness[1]},
                "tail_status": self.tail_status, "tails": self.tails, "grid": self.grid,
                "orders": "0<=j<=n"}


def _grid_spec(cfg: Config, region: Region, x: np.ndarray) -> dict[str, Any]:
    return {"x_max": cfg.x_max, "points": int(len(x)), "refine_depth": cfg.refine_depth, "region": region.to_text()}


def _weighted(la: np.ndarray, x: np.ndarray, m: int) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return m * log1p_x2(x) + la


def _tail_fits(x: np.ndarray, W: np.ndarray, region: Region, cfg: Config) -> dict[int, TailFit]:
    out = {}
    for side in region.sides():
        sel = (np.sign(x) == side) & (np.abs(x) >= cfg.tail_lo) & (np.abs(x) <= cfg.tail_hi)
        out[side] = classify_tail(np.log(np.abs(x[sel])), W[sel], cfg)
    return out


def _combine_status(statuses: list[str]) -> str:
    if "growing" in statuses:
        return "growing"
    if all(s == "decaying" for s in statuses):
        return "decaying"
    return "ambiguous"


def seminorm_pi(f, n: int, region: Region = FULL, cfg: Config = DEFAULT, include_zero: bool = True) -> SeminormEstimate:
    """Grid + golden-section lower bound for the n-th Schwartz seminorm, plus tail analysis."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = base_grid(cfg, region)
    _, la = f.log_derivs(x, n)
    js = range(0 if include_zero else 1, n + 1)
    W = {j: _weighted(la[j], x, n) for j in js}
    best = (-math.inf, None)
    for j in js:
        wj = np.where(np.isnan(W[j]), -np.inf, W[j])
        i = int(np.flatnonzero(wj == wj.max())[-1])
        if wj[i] > best[0]:
            best = (float(wj[i]), (float(x[i]), j))
    if best[1] is not None:
        cands = []
        for j in js:
            for i in local_peaks(W[j], cfg.refine_peaks):
                cands.append((float(W[j][i]), i, j))
        cands.sort(key=lambda c: (-c[0], c[1], c[2]))
        for _, i, j in cands[: cfg.refine_peaks]:
            lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
            if hi <= lo:
                continue
            t, v = golden_max(lambda t, j=j: n * math.log1p(t * t) + _point_log(f, j, t), float(lo), float(hi),
                              cfg.refine_depth)
            # symmetric peaks: prefer the positive witness
            if v > best[0] + 1e-12 or (abs(v - best[0]) <= 1e-12 and t > best[1][0]):
                best = (max(v, best[0]), (t, j))
    statuses, tails = [], {}
    for j in js:
        for side, fit in _tail_fits(x, W[j], region, cfg).items():
            st = fit.status(cfg.slope_tol)
            statuses.append("ambiguous" if st == "bounded" else st)
            tails[f"j={j},side={'+' if side > 0 else '-'}"] = fit.to_dict() | {"status": st}
    log_value = best[0]
    value = 0.0 if log_value == -math.inf else (math.exp(log_value) if log_value < 709 else math.inf)
    return SeminormEstimate(value, log_value, best[1], _combine_status(statuses), n, tails, _grid_spec(cfg, region, x))


@dataclass(frozen=True)
class DecayReport:
    """Tail behaviour of ``(1+x^2)^m |f^(j)|`` for every requested pair."""

    pairs: dict[tuple[int, int], dict[str, TailFit]]
    statuses: dict[tuple[int, int], str]
    sups: dict[tuple[int, int], float]

    def to_dict(self) -> dict[str, Any]:
        return {f"m={m},j={j}": {"status": self.statuses[(m, j)], "log_sup": _fmt(self.sups[(m, j)]),
                                 "tails": {k: v.to_dict() for k, v in self.pairs[(m, j)].items()}}
                for (m, j) in sorted(self.pairs)}


def decay_report(f, max_m: int, max_j: int, region: Region = FULL, cfg: Config = DEFAULT):
    x = base_grid(cfg, region)
    _, la = f.log_derivs(x, max_j)
    pairs, statuses, sups = {}, {}, {}
    W_all = {}
    for j in range(max_j + 1):
        for m in range(max_m + 1):
            W = _weighted(la[j], x, m)
            fits = _tail_fits(x, W, region, cfg)
            pairs[(m, j)] = {("+" if s > 0 else "-"): fit for s, fit in fits.items()}
            sts = [fit.status(cfg.slope_tol) for fit in fits.values()]
            statuses[(m, j)] = "growing" if "growing" in sts else (
                "decaying" if all(s == "decaying" for s in sts) else ("bounded" if all(s in ("decaying", "bounded") for s in sts) else "ambiguous"))
            finite = W[~np.isnan(W)]
            sups[(m, j)] = float(finite.max()) if len(finite) else math.nan
            W_all[(m, j)] = W
    return DecayReport(pairs, statuses, sups), x, W_all


def _witness_points(x: np.ndarray, W: np.ndarray, region: Region, cfg: Config, m: int, j: int, count: int = 8):
    pts = []
    for side in region.sides():
        sel = (np.sign(x) == side) & (np.abs(x) >= cfg.tail_lo)
        if not np.any(sel):
            continue
        bx, by = block_envelope(np.log(np.abs(x[sel])), W[sel], cfg.tail_blocks)
        for lx, ly in list(zip(bx, by))[-count:]:
            if np.isfinite(ly):
                pts.append({"x": _fmt(side * math.exp(lx)), "m": m, "j": j, "log_weighted": _fmt(float(ly))})
    return pts


def membership_S(f, max_order: int, region: Region = FULL, cfg: Config = DEFAULT) -> Verdict:
    """Finite-order, finite-window evidence that ``f`` lies in S (or S(region))."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    report, x, W_all = decay_report(f, max_order, max_order, region, cfg)
    failing = [(m, j) for j in range(max_order + 1) for m in range(max_order + 1) if report.statuses[(m, j)] == "growing"]
    if failing:
        m, j = failing[0]
        wit = _witness_points(x, W_all[(m, j)], region, cfg, m, j)
        wit = [w for w in wit if w["log_weighted"] != "nan"] or [{"x": "tail", "m": m, "j": j}]
        # keep the witnesses on the growing side(s) first
        return Verdict.fails(wit, reason=f"(1+x^2)^{m} |f^({j})| grows on a tail",
                             failing_pairs=[f"m={a},j={b}" for a, b in failing], report=report.to_dict())
    bad_sup = [(m, j) for (m, j), s in report.sups.items() if not math.isfinite(s) and not (s == -math.inf)]
    pending = [(m, j) for (m, j), s in sorted(report.statuses.items()) if s != "decaying"]
    if pending or bad_sup:
        return Verdict.inconclusive("tails not clearly decaying for " +
                                    ", ".join(f"m={m},j={j}" for m, j in pending or bad_sup), report=report.to_dict())
    cert = {"max_order": max_order, "region": region.to_text(),
            "log_sups": {f"m={m},j={j}": _fmt(report.sups[(m, j)]) for (m, j) in sorted(report.sups)},
            "scope": "finite-order, finite-window evidence"}
    return Verdict.holds(cert)


# ---------------------------------------------------------------------------
# D[a, b] norms


def sup_abs_on(f, k: int, a: float, b: float, points: int = 4097, depth: int = 40, peaks: int = 6) -> tuple[float, float]:
    """Refined ``sup |f^(k)|`` on [a, b]; returns (value, argmax)."""
    x = np.linspace(a, b, points)
    _, la = f.log_derivs(x, k)
    lk = np.where(np.isnan(la[k]), -np.inf, la[k])
    i0 = int(np.argmax(lk))
    best = (float(lk[i0]), float(x[i0]))
    for i in local_peaks(lk, peaks):
        lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
        t, v = golden_max(lambda t: _point_log(f, k, t), float(lo), float(hi), depth)
        if v > best[0]:
            best = (v, t)
    return (0.0 if best[0] == -math.inf else math.exp(best[0])), best[1]


def d_norm(f, n: int, a: float, b: float, tol: float = 1e-9, points: int = 4097) -> float:
    """``sum_{k<=n} sup_[a,b] |f^(k)|`` (lower bound by grid refinement)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not a < b:
        raise ValueError("need a < b")
    probe = np.concatenate([a - np.geomspace(1e-6, 1.0, 32), b + np.geomspace(1e-6, 1.0, 32)])
    leak = np.nanmax(np.abs(f.values(probe, 0)[0]))
    if leak > tol:
        warnings.warn(f"|f| reaches {leak:.3g} outside [{a}, {b}]", SupportLeakWarning, stacklevel=2)
    return float(sum(sup_abs_on(f, k, a, b, points)[0] for k in range(n + 1)))


def seminorm_csv_rows(f, n: int, region: Region = FULL, cfg: Config = DEFAULT):
    """Rows ``(x, j, m, value, log_value)`` of the weighted derivatives on the base grid."""
    x = base_grid(cfg, region)
    _, la = f.log_derivs(x, n)
    for j in range(n + 1):
        W = _weighted(la[j], x, n)
        for xi, wi in zip(x, W):
            val = math.exp(wi) if np.isfinite(wi) and wi < 709 else (0.0 if wi == -np.inf else math.inf)
            yield (float(xi), j, n, val, float(wi))
