"""Sampling grids, sup refinement and tail-growth classification (log domain)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import Config

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
LOG_DOUBLE_MAX = 700.0


@dataclass(frozen=True)
class Region:
    """Closed region: the real line, ``[lo, inf)`` or ``(-inf, hi]``."""

    lo: float = -math.inf
    hi: float = math.inf

    @classmethod
    def parse(cls, text: str | None) -> "Region":
        if text is None or text in ("", "full", "R"):
            return cls()
        a, b = text.split(":")
        lo = -math.inf if a.strip() in ("-inf", "") else float(a)
        hi = math.inf if b.strip() in ("inf", "") else float(b)
        if math.isfinite(lo) and math.isfinite(hi):
            raise ValueError("region must be unbounded on one side")
        return cls(lo, hi)

    @property
    def is_full(self) -> bool:
        return self.lo == -math.inf and self.hi == math.inf

    def contains(self, x):
        return (np.asarray(x) >= self.lo) & (np.asarray(x) <= self.hi)

    def clip(self, a: float, b: float) -> tuple[float, float]:
        return max(a, self.lo), min(b, self.hi)

    def sides(self) -> tuple[int, ...]:
        out = []
        if self.lo == -math.inf:
            out.append(-1)
        if self.hi == math.inf:
            out.append(1)
        return tuple(out)

    def to_text(self) -> str:
        if self.is_full:
            return "full"
        a = "-inf" if self.lo == -math.inf else repr(self.lo)
        b = "inf" if self.hi == math.inf else repr(self.hi)
        return f"{a}:{b}"


FULL = Region()


def base_grid(cfg: Config, region: Region = FULL, extra=()) -> np.ndarray:
    """Log-spaced points per sign on ``[x_min, x_max]``, plus 0 and a uniform core on [-1, 1]."""
    pos = np.geomspace(cfg.x_min, cfg.x_max, cfg.base_points)
    core = np.linspace(-1.0, 1.0, 257)
    pts = [pos, -pos, core, np.array([0.0]), np.asarray(extra, dtype=float)]
    near = np.geomspace(cfg.x_min, cfg.x_max, cfg.base_points // 4)
    reach = cfg.x_max
    if math.isfinite(region.lo):
        pts += [np.array([region.lo]), region.lo + near]
        reach = max(reach, abs(region.lo) + cfg.x_max)
    if math.isfinite(region.hi):
        pts += [np.array([region.hi]), region.hi - near]
        reach = max(reach, abs(region.hi) + cfg.x_max)
    x = np.unique(np.concatenate(pts))
    x = x[region.contains(x) & (np.abs(x) <= reach)]
    return x


def tail_grid(cfg: Config, side: int, n: int | None = None) -> np.ndarray:
    n = n or cfg.base_points // 4
    return side * np.geomspace(cfg.tail_lo, cfg.tail_hi, n)


def far_logs(cfg: Config, t_min: float = 1.0) -> np.ndarray:
    """log|x| values for far probes ``x = +-exp(t)``."""
    return np.geomspace(t_min, cfg.far_t_max, cfg.far_points)


def signed_logsumexp(signs: np.ndarray, logs: np.ndarray, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log|.| of ``sum(sign * exp(log))`` along ``axis``."""
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        m = np.max(np.where(signs == 0, -np.inf, logs), axis=axis, keepdims=True)
        m_safe = np.where(np.isfinite(m), m, 0.0)
        total = np.sum(np.where(signs == 0, 0.0, signs * np.exp(logs - m_safe)), axis=axis, keepdims=True)
        s = np.sign(total)
        la = np.log(np.abs(total)) + m_safe
    la = np.where(total == 0, -np.inf, la)
    la = np.where(np.isfinite(m), la, m)
    nan_any = np.any(np.isnan(logs), axis=axis, keepdims=True)
    la = np.where(nan_any, np.nan, la)
    s = np.where(nan_any, 0.0, s)
    return np.squeeze(s, axis=axis), np.squeeze(la, axis=axis)


def log1p_x2(x: np.ndarray) -> np.ndarray:
    return np.log1p(np.square(np.asarray(x, dtype=float)))


def log1p_x2_from_log(logabs: np.ndarray) -> np.ndarray:
    """log(1 + x^2) given log|x| (exact for huge |x|)."""
    la = np.asarray(logabs, dtype=float)
    return np.logaddexp(0.0, 2.0 * la)


def golden_max(fun: Callable[[float], float], a: float, b: float, depth: int) -> tuple[float, float]:
    """Golden-section search for a local maximum of ``fun`` on [a, b]."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    best = (fc, c) if fc >= fd else (fd, d)
    for _ in range(depth):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
        for v, p in ((fc, c), (fd, d)):
            if v > best[0] or (v == best[0] and p < best[1]):
                best = (v, p)
    return best[1], best[0]


def local_peaks(values: np.ndarray, count: int) -> list[int]:
    """Indices of the largest interior local maxima (ties broken by smaller index)."""
    v = np.where(np.isnan(values), -np.inf, values)
    if len(v) < 3:
        return [int(np.argmax(v))] if len(v) else []
    interior = np.flatnonzero((v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:]) & np.isfinite(v[1:-1])) + 1
    ends = [i for i in (0, len(v) - 1) if np.isfinite(v[i])]
    cand = list(interior) + ends
    cand.sort(key=lambda i: (-v[i], i))
    return [int(i) for i in cand[:count]]


# ---------------------------------------------------------------------------
# tail classification


@dataclass(frozen=True)
class TailFit:
    """Behaviour of ``log y`` against ``log|x|`` on a tail, from block maxima.

    ``kind``:
      * ``vanishing``  -- exact zeros / underflow on the far part of the tail
      * ``polynomial`` -- straight line in log-log, exponent ``slope``
      * ``super_growth`` / ``super_decay`` -- log-log slope keeps increasing / decreasing
      * ``ambiguous``  -- none of the above within ``residual_tol``
    """

    kind: str
    slope: float
    residual: float
    end_slope: float
    end_value: float
    points: int

    @property
    def decaying(self) -> bool:
        return self.kind in ("vanishing", "super_decay") or (self.kind == "polynomial" and self.slope < 0)

    @property
    def growing(self) -> bool:
        return self.kind == "super_growth" or (self.kind == "polynomial" and self.slope > 0)

    def status(self, slope_tol: float) -> str:
        """decaying | growing | bounded | ambiguous"""
        if self.kind in ("vanishing", "super_decay"):
            return "decaying"
        if self.kind == "super_growth":
            return "growing"
        if self.kind == "polynomial":
            if self.slope < -slope_tol:
                return "decaying"
            if self.slope > slope_tol:
                return "growing"
            return "bounded"
        return "ambiguous"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "slope": _r(self.slope), "residual": _r(self.residual),
                "end_slope": _r(self.end_slope)}


def _r(v: float) -> float | str:
    if v is None or not math.isfinite(v):
        return str(v)
    return float(f"{v:.12g}")


def block_envelope(logx: np.ndarray, logy: np.ndarray, blocks: int, lower: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Per-block max (or min) of ``logy`` over equal-width blocks in ``logx``; nan samples ignored."""
    ok = ~np.isnan(logy) & np.isfinite(logx)
    lx, ly = logx[ok], logy[ok]
    if len(lx) == 0:
        return np.array([]), np.array([])
    edges = np.linspace(lx.min(), lx.max(), blocks + 1)
    which = np.clip(np.searchsorted(edges, lx, side="right") - 1, 0, blocks - 1)
    bx, by = [], []
    for b in range(blocks):
        sel = which == b
        if not np.any(sel):
            continue
        vals = ly[sel]
        k = int(np.argmin(vals)) if lower else int(np.argmax(vals))
        bx.append(lx[sel][k])
        by.append(vals[k])
    return np.array(bx), np.array(by)


def classify_tail(logx: np.ndarray, logy: np.ndarray, cfg: Config, lower: bool = False) -> TailFit:
    """Classify the growth of ``y`` along a tail given ``log|x|`` and ``log y``."""
    bx, by = block_envelope(np.asarray(logx, float), np.asarray(logy, float), cfg.tail_blocks, lower=lower)
    n = len(bx)
    if n == 0:
        return TailFit("ambiguous", math.nan, math.inf, math.nan, math.nan, 0)
    finite = np.isfinite(by)
    q = max(2, n // 4)
    if not np.any(finite) or (np.all(by[-q:] == -np.inf)):
        return TailFit("vanishing", -math.inf, 0.0, -math.inf, -math.inf, n)
    fx, fy = bx[finite], by[finite]
    if np.any(fy == np.inf):
        return TailFit("super_growth", math.inf, 0.0, math.inf, math.inf, n)
    if len(fx) < 4:
        return TailFit("ambiguous", math.nan, math.inf, math.nan, float(fy[-1]), n)
    slope, icpt = np.polyfit(fx, fy, 1)
    resid = float(np.sqrt(np.mean((fy - (slope * fx + icpt)) ** 2)))
    q = max(3, len(fx) // 4)
    head_slope = float(np.polyfit(fx[:q], fy[:q], 1)[0])
    end_slope = float(np.polyfit(fx[-q:], fy[-q:], 1)[0])
    span = max(fy.max() - fy.min(), 1.0)
    if resid <= cfg.residual_tol * max(1.0, abs(slope)):
        return TailFit("polynomial", float(slope), resid, end_slope, float(fy[-1]), n)
    # curved in log-log: look for monotone acceleration
    local = np.diff(fy) / np.diff(fx)
    rising = np.mean(local > 0)
    falling = np.mean(local < 0)
    if end_slope > head_slope + 1.0 and end_slope > 1.0 and rising >= 0.75 and fy[-1] > fy[0] + 0.5 * span:
        return TailFit("super_growth", float(slope), resid, end_slope, float(fy[-1]), n)
    if end_slope < head_slope - 1.0 and end_slope < -1.0 and falling >= 0.75 and fy[-1] < fy[0] - 0.5 * span:
        return TailFit("super_decay", float(slope), resid, end_slope, float(fy[-1]), n)
    return TailFit("ambiguous", float(slope), resid, end_slope, float(fy[-1]), n)
