"""Constructive witnesses: tailored bumps, disjoint bump series, oscillating families.

The base bump is ``psi(x) = exp(1 - 1/(1 - 4 x^2))`` on (-1/2, 1/2), with
``psi(0) = 1``. ``make_bump(n)`` multiplies it by a polynomial ``p`` so that
``rho = p psi`` has ``rho(0) = 0``, ``rho'(0) = 1`` and ``rho^(j)(0) = 0`` for
``2 <= j <= n``; the coefficients come from an exact triangular system.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

import mpmath
import numpy as np
import sympy as sp

from .config import DEFAULT, Config
from .expr import X, PiecewiseFn, Points, to_text
from .faa_di_bruno import Composition, fdb_terms
from .norms import d_norm, membership_S, sup_abs_on
from .numeric import golden_max, local_peaks
from .symbols import check_condition_i, check_condition_ii, check_limit_infinity

HALF = sp.Rational(1, 2)
BASE_BUMP = sp.exp(1 - 1 / (1 - 4 * X**2))


class PreconditionError(ValueError):
    """The requested witness does not exist for this input."""


def _fmt(v) -> float | str:
    v = float(v)
    return float(f"{v:.12g}") if math.isfinite(v) else str(v)


def _dec(v, digits: int = 15) -> sp.Rational:
    """Exact rational from a rounded decimal rendering of ``v``."""
    return sp.Rational(mpmath.nstr(mpmath.mpf(v), digits, strip_zeros=True, min_fixed=-1, max_fixed=1))


def bump_fn(expr: sp.Expr, lo=-HALF, hi=HALF) -> PiecewiseFn:
    """``expr`` on the open interval (lo, hi), zero elsewhere (joins asserted smooth)."""
    return PiecewiseFn.from_pieces([(-sp.oo, lo, False, True, sp.Integer(0)),
                                    (lo, hi, False, False, expr),
                                    (hi, sp.oo, True, False, sp.Integer(0))])


def scaled_bump(lo, hi) -> sp.Expr:
    """psi rescaled to the support (lo, hi)."""
    lo, hi = sp.sympify(lo), sp.sympify(hi)
    return BASE_BUMP.subs(X, (X - (lo + hi) / 2) / (hi - lo))


# ---------------------------------------------------------------------------
# tailored bump


def psi_taylor(n: int) -> list[Fraction]:
    """Exact Taylor coefficients s_0..s_n of psi at 0.

    psi = exp(g) with g = -(u + u^2 + ...), u = 4x^2; the coefficients follow
    from psi' = g' psi, i.e. m s_m = sum_i i g_i s_{m-i}.
    """
    g = [Fraction(0)] * (n + 1)
    for k in range(1, n // 2 + 1):
        g[2 * k] = -Fraction(4) ** k
    s = [Fraction(1)] + [Fraction(0)] * n
    for m in range(1, n + 1):
        s[m] = sum((i * g[i] * s[m - i] for i in range(1, m + 1)), Fraction(0)) / m
    return s


@dataclass(frozen=True)
class BumpSpec:
    """``rho = p psi`` with exact rational ``p`` (coefficients a_0..a_n)."""

    n: int
    coeffs: tuple[Fraction, ...]
    psi_coeffs: tuple[Fraction, ...]

    @property
    def p_expr(self) -> sp.Expr:
        return sum((sp.Rational(a.numerator, a.denominator) * X**i for i, a in enumerate(self.coeffs)), sp.Integer(0))

    @property
    def rho_expr(self) -> sp.Expr:
        return self.p_expr * BASE_BUMP

    @property
    def rho(self) -> PiecewiseFn:
        return bump_fn(self.rho_expr)

    def rho_taylor(self) -> list[Fraction]:
        return [sum((self.coeffs[i] * self.psi_coeffs[m - i] for i in range(m + 1)), Fraction(0))
                for m in range(self.n + 1)]

    def derivative_at_zero(self, j: int) -> Fraction:
        """Exact rho^(j)(0) for j <= n."""
        return self.rho_taylor()[j] * math.factorial(j)

    def verify(self) -> bool:
        d = [self.derivative_at_zero(j) for j in range(self.n + 1)]
        return d[0] == 0 and d[1] == 1 and all(v == 0 for v in d[2:])

    def sup_norms(self, upto: int) -> list[float]:
        """``||rho^(j)||_oo`` for j = 0..upto (refined grid maxima)."""
        return [sup_abs_on(self.rho, j, -0.5, 0.5)[0] for j in range(upto + 1)]


def make_bump(n: int) -> BumpSpec:
    if n < 1:
        raise ValueError("n must be >= 1")
    s = psi_taylor(n)
    a = [Fraction(0), Fraction(1)] + [Fraction(0)] * (n - 1)
    # coefficient of x^m in p psi must vanish for 2 <= m <= n
    for m in range(2, n + 1):
        a[m] = -sum((a[i] * s[m - i] for i in range(1, m)), Fraction(0))
    spec = BumpSpec(n, tuple(a), tuple(s))
    assert spec.verify()
    return spec


# ---------------------------------------------------------------------------
# disjoint bump series


@lru_cache(maxsize=256)
def _mp_fn(expr: sp.Expr):
    return sp.lambdify(X, expr, "mpmath")


def _mp_derivs(f: PiecewiseFn, x, order: int) -> list:
    k = int(f.piece_index(np.array([float(x)]))[0])
    return [mpmath.mpf(_mp_fn(f.derivative_expr(k, i))(x)) for i in range(order + 1)]


@dataclass
class BumpSeries:
    """``sum_j w_j profile(x - y_j)`` with pairwise disjoint supports.

    Centers and weights are kept as mpmath numbers so the series can be
    evaluated at high precision; the float path uses rounded copies.
    Evaluation locates the single active term, nothing is summed.
    """

    profile: PiecewiseFn
    centers: tuple
    weights: tuple
    weight_kind: str
    indices: tuple[int, ...] = ()
    _sorted: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if len(self.centers) != len(self.weights):
            raise ValueError("centers and weights differ in length")
        if not self.indices:
            self.indices = tuple(range(1, len(self.centers) + 1))
        for a, b in zip(self.centers[:-1], self.centers[1:]):
            if not abs(a) + 1 < abs(b):
                raise ValueError("centers not separated: need |y_j| + 1 < |y_(j+1)|")
        self._sorted = sorted((float(c), i) for i, c in enumerate(self.centers))

    @property
    def depth(self) -> int:
        return len(self.centers)

    @property
    def log_weights(self) -> list[float]:
        return [float(mpmath.log(w)) for w in self.weights]

    def supports_disjoint(self) -> bool:
        cs = sorted(self.centers)
        return all(b - a > 1 for a, b in zip(cs[:-1], cs[1:]))

    def active(self, x: float) -> int | None:
        """Position of the term whose open support contains x."""
        keys = [c for c, _ in self._sorted]
        i = bisect.bisect_left(keys, x)
        for k in (i - 1, i):
            if 0 <= k < len(keys) and abs(x - keys[k]) < 0.5:
                return self._sorted[k][1]
        return None

    def log_derivs(self, pts, order: int) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(pts, Points):
            pts = Points.from_float(pts)
        n = len(pts)
        sign = np.zeros((order + 1, n))
        logabs = np.full((order + 1, n), -np.inf)
        owners = np.full(n, -1, dtype=int)
        for i, x in enumerate(pts.x):
            k = self.active(float(x)) if np.isfinite(x) else None
            if k is not None:
                owners[i] = k
        lw = self.log_weights
        for k in np.unique(owners[owners >= 0]):
            sel = np.flatnonzero(owners == k)
            off = pts.x[sel] - float(self.centers[k])
            s, la = self.profile.log_derivs(off, order)
            sign[:, sel] = s
            logabs[:, sel] = la + lw[k]
        bad = np.isnan(pts.logabs)
        sign[:, bad] = 0.0
        logabs[:, bad] = np.nan
        return sign, logabs

    def values(self, x, order: int = 0) -> np.ndarray:
        s, la = self.log_derivs(np.asarray(x, dtype=float), order)
        with np.errstate(over="ignore", invalid="ignore"):
            return s * np.exp(la)

    def __call__(self, x):
        return self.values(x, 0)[0]

    def term_values(self, k: int, x, order: int = 0) -> np.ndarray:
        """Derivatives 0..order of the single term k (position in ``centers``)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s, la = self.profile.log_derivs(x - float(self.centers[k]), order)
        with np.errstate(over="ignore", invalid="ignore"):
            return s * np.exp(la + self.log_weights[k])

    def mp_derivs(self, y, order: int) -> list:
        """High-precision derivatives 0..order at ``y`` (an mpf)."""
        k = self.active(float(y))
        if k is None:
            return [mpmath.mpf(0)] * (order + 1)
        off = y - self.centers[k]
        return [self.weights[k] * v for v in _mp_derivs(self.profile, off, order)]

    def term_bound_ok(self, x: float, j: int, m: int, rho_sup: float, rel: float = 1e-9) -> bool:
        """``(1+x^2)^m |f^(j)(x)| <= ||rho^(j)|| (1+x^2)^m w_k`` at a point of supp(term k)."""
        k = self.active(x)
        if k is None:
            return float(self.values([x], j)[j][0]) == 0.0
        lhs = abs(float(self.values([x], j)[j][0]))
        return lhs <= rho_sup * float(self.weights[k]) * (1 + rel)

    def to_text(self, digits: int = 17) -> str:
        """The truncated series in the expression grammar (centers and weights rounded)."""
        mid = self.profile.pieces[1].expr
        raw = []
        order = sorted(range(self.depth), key=lambda i: float(self.centers[i]))
        prev = -sp.oo
        for i in order:
            y = _dec(self.centers[i], digits)
            w = _dec(self.weights[i], digits)
            lo, hi = y - HALF, y + HALF
            raw.append((prev, lo, prev != -sp.oo, True, sp.Integer(0)))
            raw.append((lo, hi, False, False, w * mid.subs(X, X - y)))
            prev = hi
        raw.append((prev, sp.oo, True, False, sp.Integer(0)))
        return to_text(PiecewiseFn.from_pieces(raw))

    def to_dict(self) -> dict[str, Any]:
        return {"depth": self.depth, "weight_kind": self.weight_kind,
                "centers": [_fmt(c) for c in self.centers], "log_weights": [_fmt(v) for v in self.log_weights]}


# ---------------------------------------------------------------------------
# condition (i) witness


def _stable_dps(fun, x, start: int = 30, limit: int = 4000) -> int:
    """Working precision at which ``fun(x)`` (a list of mpf) is reproducible."""
    d = start
    while d <= limit:
        with mpmath.workdps(d):
            a = fun(x)
        with mpmath.workdps(d + 30):
            b = fun(x)
        if all(mpmath.isfinite(u) and mpmath.isfinite(v) and abs(u - v) <= mpmath.mpf(10) ** (-25) * max(abs(v), mpmath.mpf(1))
               for u, v in zip(a, b)):
            return d + 30
        d *= 2
    raise ArithmeticError("no stable working precision found")


def _witness_side(v) -> int:
    for w in v.witness or []:
        x = w.get("x")
        if isinstance(x, (int, float)) and x != 0:
            return 1 if x > 0 else -1
        if isinstance(x, str) and x[:1] in "+-":
            return -1 if x.startswith("-") else 1
    return 1


def _compose_mp(series: BumpSeries, phi: PiecewiseFn, n: int, x) -> Any:
    """``(f o phi)^(n)(x)`` at the working precision, term by term."""
    dphi = _mp_derivs(phi, x, n)
    df = series.mp_derivs(dphi[0], n)
    if n == 0:
        return df[0]
    total = mpmath.mpf(0)
    for term in fdb_terms(n):
        prod = term.coefficient * df[term.partition.k_total]
        for i, ki in enumerate(term.partition.k, start=1):
            if ki:
                prod *= dphi[i] ** ki
        total += prod
    return total


def _search_cond_i(phi: PiecewiseFn, n: int, J: int, side: int, window_points: int, max_windows: int):
    """x_j with |phi^(n)(x_j)| >= j (1+phi(x_j)^2)^j, |x_j|+1 < |x_(j+1)|, |phi(x_j)|+1 < |phi(x_(j+1))|."""
    found = []  # (x float, y mpf, log|phi^(n)|, dps)
    start = 0.5

    def ev(xm):
        d = _mp_derivs(phi, xm, n)
        return [d[0], d[n]]

    for j in range(1, J + 1):
        prev_x = abs(found[-1][0]) if found else None
        prev_y = abs(found[-1][1]) if found else None
        s = start if prev_x is None else prev_x + 1
        hit = None
        for w in range(max_windows):
            grid = np.linspace(s + w, s + w + 1, window_points + 1)[1:]
            dps = _stable_dps(ev, mpmath.mpf(side * float(grid[-1])))
            with mpmath.workdps(dps):
                for t in grid:
                    xm = mpmath.mpf(side * float(t))
                    y, dn = ev(xm)
                    if prev_y is not None and not abs(y) > prev_y + 1:
                        continue
                    if dn == 0:
                        continue
                    g = mpmath.log(abs(dn)) - math.log(j) - j * mpmath.log(1 + y * y)
                    if g >= 0:
                        hit = (side * float(t), +y, float(mpmath.log(abs(dn))), dps)
                        break
            if hit:
                break
        if hit is None:
            return found, j
        found.append(hit)
    return found, None


def build_witness_cond_i(phi: PiecewiseFn, n: int = 1, J: int = 8, cfg: Config = DEFAULT,
                         window_points: int = 2048, max_windows: int = 64, membership_orders: int | None = None):
    """Series f in S with |(f o phi)^(n)(x_k)| >= k, for a phi violating the polynomial bound on phi^(n)."""
    v = check_condition_i(phi, n, cfg)
    if not v.failed or not any(w.get("j") == n for w in v.witness or []):
        raise PreconditionError(f"condition (i) does not fail at order {n} (status {v.status.value})")
    side = _witness_side(v)
    spec = make_bump(n)
    found, stuck = _search_cond_i(phi, n, J, side, window_points, max_windows)
    report: dict[str, Any] = {"violation": "i", "n": n, "J": J, "side": side, "bump_p": str(spec.p_expr)}
    if not found:
        report.update(status="Inconclusive", reason=f"no witness point found for j={stuck}")
        return None, report
    weights, centers = [], []
    for j, (_, y, _, dps) in enumerate(found, start=1):
        with mpmath.workdps(dps):
            centers.append(y)
            weights.append((1 + y * y) ** (-j))
    series = BumpSeries(spec.rho, tuple(centers), tuple(weights), "(1+|y_j|^2)^-j")
    rows, ok_b = [], True
    for k, (x, y, ldn, dps) in enumerate(found, start=1):
        with mpmath.workdps(dps):
            val = abs(_compose_mp(series, phi, n, mpmath.mpf(x)))
            ratio = val / k
        good = bool(ratio >= 1 - cfg.tol)
        ok_b &= good
        rows.append({"k": k, "x": _fmt(x), "phi": _fmt(y), "log_abs_phi_n": _fmt(ldn),
                     "log_weight": _fmt(series.log_weights[k - 1]), "value": _fmt(val), "target": k,
                     "ratio": _fmt(ratio), "ok": good, "dps": dps})
    orders = membership_orders or cfg.max_order
    member = {m: membership_S(series, m, cfg=cfg).status.value for m in range(1, orders + 1)}
    ok_a = all(s == "Holds" for s in member.values())
    report.update(rows=rows, membership=member, check_a=ok_a, check_b=ok_b)
    if stuck is not None:
        report.update(status="Inconclusive", reason=f"sequence extension failed at j={stuck}")
    else:
        report["status"] = "Holds" if ok_a and ok_b else "Fails"
    return series, report


# ---------------------------------------------------------------------------
# condition (ii) witness


def _search_cond_ii(phi: PiecewiseFn, J: int, side: int, t_max: float, step: float):
    """x_j with |x_j| >= |phi(x_j)|^j plus the separations; scanned in t = log|x|."""
    found = []  # (log|x|, y float)
    t0 = 0.0
    chunk = 512
    for j in range(1, J + 1):
        if found:
            lx, y_prev = found[-1]
            t0 = math.log(math.exp(lx) + 1) if lx < 700 else lx
        hit = None
        t = t0
        while t < t_max and hit is None:
            ts = t + step * np.arange(1, chunk + 1)
            s, la = phi.log_derivs(Points.from_log(np.full(len(ts), float(side)), ts), 0)
            with np.errstate(over="ignore", invalid="ignore"):
                y = s[0] * np.exp(la[0])
            ok = (ts - j * la[0] >= 0) & np.isfinite(y) & (np.abs(y) > 1)
            if found:
                ok &= np.abs(y) > abs(found[-1][1]) + 1
            idx = np.flatnonzero(ok)
            if len(idx):
                hit = (float(ts[idx[0]]), float(y[idx[0]]))
            t = float(ts[-1])
        if hit is None:
            return found, j
        found.append(hit)
    return found, None


def build_witness_cond_ii(phi: PiecewiseFn, J: int = 10, cfg: Config = DEFAULT, step: float = 0.01,
                          membership_orders: int | None = None):
    """Series f = sum psi(x - y_j) / |y_j|^j with |x_j| f(phi(x_j)) >= 1, for a slowly growing phi.

    The profile is psi itself (value 1 at the center): the check evaluates
    f o phi, not a derivative, so a profile vanishing at 0 would give 0.
    """
    v = check_condition_ii(phi, cfg)
    if not v.failed:
        raise PreconditionError(f"condition (ii) does not fail (status {v.status.value})")
    side = _witness_side(v)
    found, stuck = _search_cond_ii(phi, J, side, cfg.far_t_max, step)
    report: dict[str, Any] = {"violation": "ii", "J": J, "side": side, "profile": "psi"}
    if not found:
        report.update(status="Inconclusive", reason=f"no witness point found for j={stuck}")
        return None, report
    centers = tuple(mpmath.mpf(y) for _, y in found)
    weights = tuple(abs(c) ** (-j) for j, c in enumerate(centers, start=1))
    series = BumpSeries(bump_fn(BASE_BUMP), centers, weights, "|y_j|^-j")
    rows, ok_b = [], True
    lx = np.array([t for t, _ in found])
    comp = Composition(series, phi)
    s, la = comp.log_derivs(Points.from_log(np.full(len(lx), float(side)), lx), 0)
    for j, (t, y) in enumerate(found, start=1):
        lv = t + la[0, j - 1]
        val = math.exp(lv) if lv < 709 else math.inf
        good = bool(val >= 1 - cfg.tol)
        ok_b &= good
        rows.append({"j": j, "x": _fmt(side * math.exp(t)) if t < 700 else f"{'-' if side < 0 else ''}exp({t:.6g})",
                     "log_x": _fmt(t), "phi": _fmt(y), "log_weight": _fmt(series.log_weights[j - 1]),
                     "value": _fmt(val), "ok": good})
    orders = membership_orders or cfg.max_order
    member = {m: membership_S(series, m, cfg=cfg).status.value for m in range(1, orders + 1)}
    ok_a = all(st == "Holds" for st in member.values())
    report.update(rows=rows, membership=member, check_a=ok_a, check_b=ok_b)
    if stuck is not None:
        report.update(status="Inconclusive", reason=f"sequence extension failed at j={stuck}")
    else:
        report["status"] = "Holds" if ok_a and ok_b else "Fails"
    return series, report


# ---------------------------------------------------------------------------
# bounded-subsequence witness


def lemma1_witness(phi: PiecewiseFn, J: int = 8, cfg: Config = DEFAULT):
    """Bump f with f(l) = 1 at a cluster value l of phi; |x_j f(phi(x_j))| grows along the witnesses."""
    v, _ = check_limit_infinity(phi, cfg, count=J)
    if not v.failed:
        raise PreconditionError(f"|phi| -> oo is not refuted (status {v.status.value})")
    ell = v.notes.get("ell", v.witness[0].get("ell"))
    ell_r = _dec(ell, 12)
    f = bump_fn(BASE_BUMP.subs(X, X - ell_r), ell_r - HALF, ell_r + HALF)
    xs = np.array([float(w["x"]) for w in v.witness][:J])
    fx = Composition(f, phi).values(xs, 0)[0]
    vals = np.abs(xs * fx)
    rows = [{"j": j, "x": _fmt(x), "phi": _fmt(phi(np.array([x]))[0]), "f_phi": _fmt(a), "value": _fmt(b)}
            for j, (x, a, b) in enumerate(zip(xs, fx, vals), start=1)]
    growing = bool(len(vals) > 1 and vals[-1] > vals[0] and np.all(np.diff(vals) > 0))
    report = {"violation": "lemma1", "ell": _fmt(ell), "f_at_ell": _fmt(f(np.array([float(ell_r)]))[0]),
              "rows": rows, "growing": growing, "status": "Holds" if growing else "Inconclusive"}
    return f, report


# ---------------------------------------------------------------------------
# non-compactness families


@dataclass(frozen=True)
class FamilyMember:
    j: int
    omega: float
    amplitude: float
    f: PiecewiseFn
    norm_pm1: float
    sup_p: float
    sup_composed: float

    def to_dict(self) -> dict[str, Any]:
        return {"j": self.j, "omega": _fmt(self.omega), "amplitude": _fmt(self.amplitude),
                "norm_p_minus_1": _fmt(self.norm_pm1), "sup_f_p": _fmt(self.sup_p),
                "sup_composed_p": _fmt(self.sup_composed), "f": to_text(self.f)}


@dataclass(frozen=True)
class NonCompactFamily:
    """Members of norm eps in D[c,d]_(p-1) whose compositions have p-th derivative >= j on [a,b]."""

    a: float
    b: float
    c: float
    d: float
    delta: float
    p: int
    eps: float
    lam: float
    members: tuple[FamilyMember, ...]

    def member_ok(self, m: FamilyMember, rel: float = 1e-6) -> dict[str, bool]:
        return {"norm": abs(m.norm_pm1 - self.eps) <= rel * self.eps,
                "derivative_gap": self.delta**self.p * m.sup_p > self.lam * self.eps + m.j,
                "composed": m.sup_composed >= m.j}

    def verify(self, phi: PiecewiseFn | None = None) -> bool:
        """Re-check every member invariant; with ``phi`` the norms are recomputed from scratch."""
        for m in self.members:
            if phi is not None:
                m = FamilyMember(m.j, m.omega, m.amplitude, m.f, d_norm(m.f, self.p - 1, self.c, self.d),
                                 sup_abs_on(m.f, self.p, self.c, self.d)[0],
                                 sup_abs_on(Composition(m.f, phi), self.p, self.a, self.b)[0])
            if not all(self.member_ok(m).values()):
                return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {"interval": [_fmt(self.a), _fmt(self.b)], "image": [_fmt(self.c), _fmt(self.d)],
                "delta": _fmt(self.delta), "p": self.p, "eps": _fmt(self.eps), "lambda_p": _fmt(self.lam),
                "members": [m.to_dict() for m in self.members]}


def _refined_extreme(fun_arr, fun_pt, a: float, b: float, points: int, depth: int, peaks: int) -> tuple[float, float]:
    """max of a scalar function on [a, b]: grid then golden refinement of the best local peaks."""
    x = np.linspace(a, b, points)
    v = fun_arr(x)
    i0 = int(np.nanargmax(v))
    best = (float(v[i0]), float(x[i0]))
    for i in local_peaks(v, peaks):
        lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
        t, val = golden_max(fun_pt, float(lo), float(hi), depth)
        if val > best[0]:
            best = (val, t)
    return best


def cofactor_values(phi: PiecewiseFn, p: int, m: int, x) -> np.ndarray:
    """Q_m(x): the coefficient of f^(m)(phi(x)) in (f o phi)^(p)."""
    d = phi.values(np.atleast_1d(np.asarray(x, dtype=float)), p)
    total = np.zeros(d.shape[1])
    for term in fdb_terms(p):
        if term.partition.k_total != m:
            continue
        prod = np.full(d.shape[1], float(term.coefficient))
        for i, ki in enumerate(term.partition.k, start=1):
            if ki:
                prod = prod * d[i] ** ki
        total = total + prod
    return total


def monotone_delta(phi: PiecewiseFn, a: float, b: float, points: int = 4097, depth: int = 40) -> float:
    """min |phi'| on [a, b]; raises PreconditionError unless phi' keeps one sign and stays away from 0."""
    x = np.linspace(a, b, points)
    d1 = phi.values(x, 1)[1]
    if not (np.all(d1 > 0) or np.all(d1 < 0)):
        raise PreconditionError(f"phi is not strictly monotone on [{a}, {b}]")
    neg = _refined_extreme(lambda t: -np.abs(phi.values(t, 1)[1]),
                           lambda t: -abs(float(phi.values(np.array([t]), 1)[1][0])), a, b, points, depth, 6)
    delta = -neg[0]
    if not delta > 0:
        raise PreconditionError(f"phi' vanishes on [{a}, {b}]")
    return delta


def faa_residual_constant(phi: PiecewiseFn, p: int, a: float, b: float, points: int = 4097, depth: int = 40) -> float:
    """lambda_p = max over 1 <= m < p of sup_[a,b] |Q_m|."""
    lam = 0.0
    for m in range(1, p):
        v, _ = _refined_extreme(lambda t, m=m: np.abs(cofactor_values(phi, p, m, t)),
                                lambda t, m=m: abs(float(cofactor_values(phi, p, m, [t])[0])), a, b, points, depth, 6)
        lam = max(lam, v)
    return lam


def _oscillating(omega: sp.Rational, c, d, shift=None) -> PiecewiseFn:
    c, d = sp.sympify(c), sp.sympify(d)
    phase = X - c if shift is None else X - shift
    return bump_fn(sp.sin(omega * phase) * scaled_bump(c, d), c, d)


def noncompact_family(phi: PiecewiseFn, a: float, b: float, p: int = 2, eps: float = 1.0, J: int = 20,
                      growth: float = 2 ** 0.25, max_steps: int = 200) -> NonCompactFamily:
    """Members f_j = A_j sin(omega_j (y - c)) psi-bump on [c, d] = phi([a, b]).

    omega_j increases until delta^p ||f_j^(p)|| > lambda_p eps + j with
    ||f_j||_(p-1) = eps; every member is re-verified before returning.
    """
    if p < 1 or eps <= 0 or not a < b:
        raise ValueError("need p >= 1, eps > 0 and a < b")
    delta = monotone_delta(phi, a, b)
    lam = faa_residual_constant(phi, p, a, b)
    ends = phi.values(np.array([a, b]), 0)[0]
    c, d = float(min(ends)), float(max(ends))
    cr, dr = _dec(c), _dec(d)
    c, d = float(cr), float(dr)
    members = []
    omega = 2 * math.pi / (d - c)
    for j in range(1, J + 1):
        for _ in range(max_steps):
            omega *= growth
            om = _dec(omega, 12)
            unit = _oscillating(om, cr, dr)
            n_unit = d_norm(unit, p - 1, c, d)
            s_unit = sup_abs_on(unit, p, c, d)[0]
            if delta**p * s_unit * eps / n_unit > lam * eps + j:
                break
        else:
            raise RuntimeError(f"no frequency found for member {j}")
        amp = _dec(eps / n_unit, 15)
        f = unit.map_exprs(lambda e: amp * e)
        m = FamilyMember(j, float(om), float(amp), f, d_norm(f, p - 1, c, d), sup_abs_on(f, p, c, d)[0],
                         sup_abs_on(Composition(f, phi), p, a, b)[0])
        members.append(m)
    fam = NonCompactFamily(float(a), float(b), c, d, delta, p, float(eps), lam, tuple(members))
    bad = [m.j for m in members if not all(fam.member_ok(m).values())]
    if bad:
        raise RuntimeError(f"family members failed verification: {bad}")
    return fam


@dataclass(frozen=True)
class NormGap:
    f: PiecewiseFn
    omega: float
    norm_n: float
    norm_n1: float
    n: int

    @property
    def ratio(self) -> float:
        return self.norm_n1 / self.norm_n

    def to_dict(self) -> dict[str, Any]:
        return {"omega": _fmt(self.omega), "n": self.n, "norm_n": _fmt(self.norm_n), "norm_n_plus_1": _fmt(self.norm_n1),
                "ratio": _fmt(self.ratio), "f": to_text(self.f)}


def norm_gap_function(a: float, b: float, n: int, ratio: float, max_doublings: int = 40) -> NormGap:
    """f = sin(omega x) bump_[a,b] with ||f||_(n+1) / ||f||_n >= ratio in D[a, b]."""
    if not ratio > 1:
        raise ValueError("ratio must exceed 1")
    if not a < b:
        raise ValueError("need a < b")
    ar, br = _dec(a), _dec(b)
    omega = 1.0
    for _ in range(max_doublings):
        om = _dec(omega, 12)
        f = _oscillating(om, ar, br, shift=0)
        lo, hi = d_norm(f, n, a, b), d_norm(f, n + 1, a, b)
        if hi >= ratio * lo:
            return NormGap(f, float(om), lo, hi, n)
        omega *= 2
    raise RuntimeError("ratio not reached")
