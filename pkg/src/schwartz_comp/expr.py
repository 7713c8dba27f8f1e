"""Piecewise-smooth functions of one real variable.

Each piece is a sympy expression in ``X``; breakpoints are exact rationals or
``+-oo``. Differentiation is exact (piecewise, breakpoints preserved).
Numeric work goes through :meth:`PiecewiseFn.log_derivs`, which returns
signs and ``log|value|`` so that quantities like ``exp(x^2)`` at ``x = 1e4``
never overflow: a double-precision fast path handles ordinary points and an
mpmath path (unbounded exponent range) takes over wherever the fast path
produces ``inf``/``nan``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import mpmath
import numpy as np
import sympy as sp

from .verdict import Verdict

X = sp.Symbol("x", real=True)

# mpmath trig of |arg| > 2**TRIG_MAG_LIMIT is expensive and meaningless at the
# working precision; such samples are reported as indeterminate (nan).
TRIG_MAG_LIMIT = 30000


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


class DomainError(ArithmeticError):
    """Evaluation left the domain of an expression (log/sqrt of a nonpositive value, 1/0)."""


class Indeterminate(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# tokenizer / recursive-descent parser

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()\[\],;:]))")

_FUNCS = {"exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos, "sqrt": sp.sqrt}
_CONSTS = {"e": sp.E, "pi": sp.pi}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup or "op"
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ExprSyntaxError:
        tok = tok or self.tok
        what = f"unexpected {tok.text!r}" if tok.kind != "end" else "unexpected end of input"
        return ExprSyntaxError(f"{msg}: {what}" if msg else what, tok.pos, self.text)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            raise self.error(f"expected {text!r}")
        return tok

    # fn := expr | piecewise(...)
    def parse_fn(self) -> "PiecewiseFn":
        if self.tok.kind == "name" and self.tok.text == "piecewise":
            self.i += 1
            fn = self.parse_piecewise()
        else:
            fn = PiecewiseFn.single(self.parse_expr())
        if self.tok.kind != "end":
            raise self.error("trailing input")
        return fn

    def parse_piecewise(self) -> "PiecewiseFn":
        self.expect("(")
        raw: list[tuple[Any, Any, bool, bool, sp.Expr, int]] = []
        blend: int | None = None
        while True:
            if self.tok.kind == "name" and self.tok.text == "blend":
                self.i += 1
                self.expect(":")
                tok = self.tok
                if tok.kind != "num" or not tok.text.isdigit():
                    raise self.error("blend order must be a nonnegative integer")
                self.i += 1
                blend = int(tok.text)
                break
            start = self.tok
            if self.accept("("):
                lo_closed = False
            elif self.accept("["):
                lo_closed = True
            else:
                raise self.error("expected interval")
            lo = self.parse_bound()
            self.expect(",")
            hi = self.parse_bound()
            if self.accept(")"):
                hi_closed = False
            elif self.accept("]"):
                hi_closed = True
            else:
                raise self.error("expected ')' or ']'")
            self.expect(":")
            raw.append((lo, hi, lo_closed, hi_closed, self.parse_expr(), start.pos))
            if not self.accept(";"):
                break
        self.expect(")")
        return PiecewiseFn.from_pieces(raw, blend, text=self.text)

    def parse_bound(self):
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        tok = self.tok
        if tok.kind == "name" and tok.text in ("inf", "oo"):
            self.i += 1
            return sign * sp.oo
        if tok.kind != "num":
            raise self.error("expected rational bound or inf")
        self.i += 1
        val = sp.Rational(tok.text)
        if self.accept("/"):
            den = self.tok
            if den.kind != "num":
                raise self.error("expected denominator")
            self.i += 1
            val = val / sp.Rational(den.text)
        return sign * val

    def parse_expr(self) -> sp.Expr:
        node = self.parse_term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            rhs = self.parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term(self) -> sp.Expr:
        node = self.parse_unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            rhs = self.parse_unary()
            if op == "/":
                if rhs == 0:
                    raise ExprSyntaxError("division by literal zero", self.toks[self.i - 1].pos, self.text)
                node = node / rhs
            else:
                node = node * rhs
        return node

    def parse_unary(self) -> sp.Expr:
        if self.accept("-"):
            return -self.parse_unary()
        if self.accept("+"):
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> sp.Expr:
        base = self.parse_primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            at = self.tok
            expo = self.parse_unary()
            if not (expo.is_Integer):
                raise ExprSyntaxError("exponent must be an integer constant", at.pos, self.text)
            if base == 0 and expo < 0:
                raise ExprSyntaxError("zero to a negative power", at.pos, self.text)
            return base ** expo
        return base

    def parse_primary(self) -> sp.Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return sp.Rational(tok.text)
        if tok.kind == "name":
            self.i += 1
            if tok.text == "x":
                return X
            if tok.text in _CONSTS:
                return _CONSTS[tok.text]
            if tok.text in _FUNCS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return _FUNCS[tok.text](arg)
            raise ExprSyntaxError(f"unknown name {tok.text!r}", tok.pos, self.text)
        if self.accept("("):
            node = self.parse_expr()
            self.expect(")")
            return node
        raise self.error("")


def parse(text: str) -> "PiecewiseFn":
    """Parse the expression grammar (plain expression or ``piecewise(...)``)."""
    return _Parser(text).parse_fn()


def parse_expr(text: str) -> sp.Expr:
    p = _Parser(text)
    e = p.parse_expr()
    if p.tok.kind != "end":
        raise p.error("trailing input")
    return e


# ---------------------------------------------------------------------------
# printing in the grammar


def _fmt_rational(r: sp.Rational) -> str:
    return str(r.p) if r.q == 1 else f"{r.p}/{r.q}"


def expr_to_text(e: sp.Expr) -> str:
    return _pr(sp.sympify(e), 0)


_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _wrap(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _pr(e: sp.Expr, outer: int) -> str:
    if e is X or (e.is_Symbol and e.name == "x"):
        return "x"
    if e is sp.E:
        return "e"
    if e is sp.pi:
        return "pi"
    if e.is_Rational:
        s = _fmt_rational(e)
        prec = _PREC_ATOM if e.q == 1 and e >= 0 else (_PREC_MUL if e >= 0 else _PREC_UNARY)
        if e < 0:
            prec = _PREC_ADD
        return _wrap(s, prec, outer)
    if e.is_Float:
        return _wrap(_fmt_rational(sp.Rational(str(e))), _PREC_ADD, outer)
    if e.is_Add:
        terms = sp.Add.make_args(e)
        terms = sorted(terms, key=sp.default_sort_key)
        out = _pr(terms[0], _PREC_ADD)
        for t in terms[1:]:
            c, rest = t.as_coeff_Mul()
            if c.is_Rational and c < 0:
                out += " - " + _pr(-t, _PREC_MUL)
            else:
                out += " + " + _pr(t, _PREC_MUL)
        return _wrap(out, _PREC_ADD, outer)
    if e.is_Mul:
        c, rest = e.as_coeff_Mul()
        if c.is_Rational and c < 0:
            return _wrap("-" + _pr(-e, _PREC_UNARY), _PREC_UNARY, outer)
        num, den = [], []
        for f in sp.Mul.make_args(rest):
            b, ex = f.as_base_exp()
            if ex.is_Integer and ex < 0:
                den.append(b ** (-ex))
            else:
                num.append(_pr(f, _PREC_MUL + 1))
        if c != 1 or not num:
            num.insert(0, _pr(c, _PREC_MUL))
        s = "*".join(num)
        if den:
            d = sp.Mul(*den)
            s += "/" + _pr(d, _PREC_POW)
        return _wrap(s, _PREC_MUL, outer)
    if e.is_Pow:
        b, ex = e.args
        if ex == sp.Rational(1, 2):
            return f"sqrt({_pr(b, 0)})"
        if ex.is_Rational and ex.q == 2:
            return _wrap(f"sqrt({_pr(b, 0)})^{_pr(sp.Integer(ex.p), _PREC_UNARY)}", _PREC_POW, outer)
        if ex.is_Integer and ex < 0:
            return _wrap(f"1/{_pr(b ** (-ex), _PREC_POW)}", _PREC_MUL, outer)
        return _wrap(f"{_pr(b, _PREC_POW + 1)}^{_pr(ex, _PREC_UNARY)}", _PREC_POW, outer)
    if isinstance(e, sp.exp):
        return f"exp({_pr(e.args[0], 0)})"
    for name, cls in (("log", sp.log), ("sin", sp.sin), ("cos", sp.cos)):
        if isinstance(e, cls):
            return f"{name}({_pr(e.args[0], 0)})"
    raise ValueError(f"cannot print {e!r} in the expression grammar")


# ---------------------------------------------------------------------------
# numeric evaluation helpers


def _guard_trig(fn):
    def wrapped(a):
        if isinstance(a, mpmath.mpf) and mpmath.mag(a) > TRIG_MAG_LIMIT:
            raise Indeterminate("trig argument beyond precision")
        return fn(a)

    return wrapped


_MP_MODULES = [{"sin": _guard_trig(mpmath.sin), "cos": _guard_trig(mpmath.cos)}, "mpmath"]


@dataclass
class Points:
    """Sample points, kept both as doubles and as (sign, log|x|).

    ``x`` is ``+-inf`` where the point lies beyond double range; the mpmath
    path then rebuilds it from ``sign`` and ``logabs``.
    """

    x: np.ndarray
    sign: np.ndarray
    logabs: np.ndarray

    @classmethod
    def from_float(cls, x) -> "Points":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return cls(x, np.sign(x), np.log(np.abs(x)))

    @classmethod
    def from_log(cls, sign, logabs) -> "Points":
        sign = np.atleast_1d(np.asarray(sign, dtype=float))
        logabs = np.atleast_1d(np.asarray(logabs, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.where(sign == 0, 0.0, sign * np.exp(logabs))
        x = np.where(np.isnan(logabs), np.nan, x)
        return cls(x, sign, logabs)

    def __len__(self) -> int:
        return len(self.x)

    def take(self, idx) -> "Points":
        return Points(self.x[idx], self.sign[idx], self.logabs[idx])

    def mp(self, i: int):
        if np.isfinite(self.x[i]):
            return mpmath.mpf(float(self.x[i]))
        return int(self.sign[i]) * mpmath.exp(mpmath.mpf(float(self.logabs[i])))


class _Compiled:
    """numpy and mpmath callables for one sympy expression."""

    def __init__(self, expr: sp.Expr):
        self.expr = expr
        self.const = None
        if not expr.has(X):
            val = complex(sp.N(expr, 30))
            self.const = val.real
        self.np_fn = sp.lambdify(X, expr, "numpy")
        self.mp_fn = sp.lambdify(X, expr, _MP_MODULES)

    def mp_eval(self, xv):
        try:
            v = self.mp_fn(xv)
        except ZeroDivisionError as exc:
            raise DomainError(f"division by zero in {expr_to_text(self.expr)} at x={mpmath.nstr(xv, 12)}") from exc
        except Indeterminate:
            return None
        if isinstance(v, mpmath.mpc):
            if abs(v.imag) > 1e-30 * max(1, abs(v.real)):
                raise DomainError(f"complex value of {expr_to_text(self.expr)} at x={mpmath.nstr(xv, 12)}")
            v = v.real
        return mpmath.mpf(v)

    def log_eval(self, pts: Points) -> tuple[np.ndarray, np.ndarray]:
        n = len(pts)
        if self.const is not None:
            c = self.const
            s = np.full(n, float(np.sign(c)))
            la = np.full(n, math.log(abs(c)) if c != 0 else -np.inf)
            return s, la
        xs = pts.x
        with np.errstate(all="ignore"):
            v = self.np_fn(xs)
        v = np.broadcast_to(np.asarray(v, dtype=complex if np.iscomplexobj(v) else float), (n,)).copy()
        if np.iscomplexobj(v):
            v = np.where(np.abs(v.imag) > 0, np.nan, v.real).astype(float)
        with np.errstate(divide="ignore"):
            s = np.sign(v)
            la = np.log(np.abs(v))
        bad = ~np.isfinite(v) | ~np.isfinite(xs)
        for i in np.flatnonzero(bad):
            if np.isnan(pts.logabs[i]):
                s[i], la[i] = 0.0, np.nan
                continue
            r = self.mp_eval(pts.mp(i))
            if r is None:
                s[i], la[i] = 0.0, np.nan
            elif r == 0:
                s[i], la[i] = 0.0, -np.inf
            else:
                s[i] = 1.0 if r > 0 else -1.0
                la[i] = float(mpmath.log(abs(r)))
        return s, la


@lru_cache(maxsize=4096)
def _compiled(expr: sp.Expr) -> _Compiled:
    return _Compiled(expr)


# ---------------------------------------------------------------------------
# Hermite bridge


@lru_cache(maxsize=64)
def _hermite_basis(order: int) -> tuple[tuple[sp.Expr, ...], tuple[sp.Expr, ...]]:
    """Two-point Hermite basis on [0, 1] matching derivatives 0..order at both ends."""
    t = sp.Symbol("t")
    left = []
    for i in range(order + 1):
        tail = sum(sp.binomial(order + k, k) * t**k for k in range(order - i + 1))
        left.append(sp.expand(t**i / sp.factorial(i) * (1 - t) ** (order + 1) * tail))
    right = [sp.expand((-1) ** i * h.subs(t, 1 - t)) for i, h in enumerate(left)]
    return tuple(left), tuple(right)


def one_sided_value(expr: sp.Expr, point, direction: str) -> sp.Expr:
    """Exact value of ``expr`` at ``point``, falling back to the one-sided limit."""
    v = sp.simplify(expr.subs(X, point)) if expr.has(X) else expr
    if v.is_finite is False or v.has(sp.zoo, sp.nan, sp.oo, -sp.oo):
        v = sp.limit(expr, X, point, dir=direction)
    return v


def hermite_bridge(left: sp.Expr, right: sp.Expr, a, b, order: int) -> sp.Expr:
    """Polynomial on [a, b] whose derivatives up to ``order`` match ``left`` at a and ``right`` at b."""
    h0, h1 = _hermite_basis(order)
    t = sp.Symbol("t")
    s = sp.Rational(b - a)
    acc = sp.Integer(0)
    dl, dr = left, right
    for i in range(order + 1):
        li = one_sided_value(dl, a, "-")
        ri = one_sided_value(dr, b, "+")
        acc += li * s**i * h0[i] + ri * s**i * h1[i]
        dl, dr = sp.diff(dl, X), sp.diff(dr, X)
    poly = sp.Poly(sp.expand(acc), t)
    coeffs = [sp.nsimplify(sp.expand(c)) if c.is_number else c for c in poly.all_coeffs()]
    tx = (X - a) / s
    out = sp.Integer(0)
    for c in coeffs:
        out = out * tx + c
    return sp.expand(out)


# ---------------------------------------------------------------------------
# piecewise functions


@dataclass(frozen=True)
class Piece:
    lo: sp.Expr
    hi: sp.Expr
    lo_closed: bool
    hi_closed: bool
    expr: sp.Expr
    origin: str = "given"  # "given" | "blend"

    def contains(self, x: float) -> bool:
        lo, hi = float(self.lo), float(self.hi)
        if x < lo or x > hi:
            return False
        if x == lo and not self.lo_closed:
            return False
        if x == hi and not self.hi_closed:
            return False
        return True

    def interval_text(self) -> str:
        def b(v):
            if v == sp.oo:
                return "inf"
            if v == -sp.oo:
                return "-inf"
            return _fmt_rational(sp.Rational(v))

        return ("[" if self.lo_closed else "(") + f"{b(self.lo)},{b(self.hi)}" + ("]" if self.hi_closed else ")")


@dataclass(frozen=True)
class PiecewiseFn:
    """Ordered pieces partitioning the real line.

    ``joins[i]`` describes the breakpoint between pieces ``i`` and ``i+1``:
    ``"asserted"`` (user claims smoothness) or ``"blend"`` (one side of an
    automatically inserted Hermite bridge).
    """

    pieces: tuple[Piece, ...]
    blend_order: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def single(cls, expr: sp.Expr) -> "PiecewiseFn":
        return cls((Piece(-sp.oo, sp.oo, False, False, sp.sympify(expr)),))

    @classmethod
    def from_pieces(cls, raw: Sequence, blend: int | None = None, text: str = "") -> "PiecewiseFn":
        """Validate user pieces ``(lo, hi, lo_closed, hi_closed, expr[, offset])`` and fill gaps by blends."""
        given: list[Piece] = []
        for item in raw:
            lo, hi, lc, hc, e = item[:5]
            pos = item[5] if len(item) > 5 else 0
            lo, hi = sp.sympify(lo), sp.sympify(hi)
            if not lo < hi:
                raise ExprSyntaxError("non-monotone breakpoints (empty interval)", pos, text)
            if given:
                prev = given[-1]
                if lo < prev.lo:
                    raise ExprSyntaxError("non-monotone breakpoints", pos, text)
                if lo < prev.hi:
                    raise ExprSyntaxError("overlapping pieces", pos, text)
            if lo == -sp.oo:
                lc = False
            if hi == sp.oo:
                hc = False
            given.append(Piece(lo, hi, bool(lc), bool(hc), sp.sympify(e)))
        if not given:
            raise ExprSyntaxError("piecewise needs at least one piece", 0, text)
        if given[0].lo != -sp.oo or given[-1].hi != sp.oo:
            raise ExprSyntaxError("pieces must cover the real line (start at -inf, end at inf)", 0, text)
        pieces: list[Piece] = [given[0]]
        for nxt in given[1:]:
            prev = pieces[-1]
            if nxt.lo == prev.hi:
                if not prev.hi_closed and not nxt.lo_closed:
                    raise ExprSyntaxError(f"point {nxt.lo} not covered", 0, text)
            else:
                if blend is None:
                    raise ExprSyntaxError(f"gap ({prev.hi},{nxt.lo}) needs 'blend: J'", 0, text)
                bridge = hermite_bridge(prev.expr, nxt.expr, prev.hi, nxt.lo, blend)
                pieces.append(Piece(prev.hi, nxt.lo, not prev.hi_closed, not nxt.lo_closed, bridge, "blend"))
            pieces.append(nxt)
        return cls(tuple(pieces), blend)

    # -- structure --------------------------------------------------------

    @property
    def breakpoints(self) -> tuple[sp.Expr, ...]:
        return tuple(p.hi for p in self.pieces[:-1])

    @property
    def joins(self) -> tuple[str, ...]:
        out = []
        for a, b in zip(self.pieces[:-1], self.pieces[1:]):
            out.append("blend" if "blend" in (a.origin, b.origin) else "asserted")
        return tuple(out)

    @property
    def is_single(self) -> bool:
        return len(self.pieces) == 1

    @property
    def expr(self) -> sp.Expr:
        if not self.is_single:
            raise ValueError("piecewise function has more than one piece")
        return self.pieces[0].expr

    def is_polynomial(self) -> bool:
        return all(_is_rational_poly(p.expr) for p in self.pieces)

    def map_exprs(self, fn) -> "PiecewiseFn":
        return PiecewiseFn(tuple(Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, fn(p.expr), p.origin) for p in self.pieces),
                           self.blend_order)

    def derivative_expr(self, piece: int, order: int) -> sp.Expr:
        key = ("d", piece, order)
        if key not in self._cache:
            if order == 0:
                self._cache[key] = self.pieces[piece].expr
            else:
                self._cache[key] = sp.diff(self.derivative_expr(piece, order - 1), X)
        return self._cache[key]

    def piece_index(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.zeros(x.shape, dtype=int)
        for k, (a, b) in enumerate(zip(self.pieces[:-1], self.pieces[1:])):
            bp = float(a.hi)
            # a point on the breakpoint goes to the left piece unless only the right one contains it
            on_right = (x > bp) | ((x == bp) & (not a.hi_closed))
            idx = np.where(on_right, k + 1, idx)
        return idx

    # -- numerics ---------------------------------------------------------

    def log_derivs(self, pts: Points | np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
        """Signs and log-magnitudes of derivatives 0..order, shape ``(order+1, n)``."""
        if not isinstance(pts, Points):
            pts = Points.from_float(pts)
        n = len(pts)
        sign = np.zeros((order + 1, n))
        logabs = np.full((order + 1, n), -np.inf)
        idx = self.piece_index(np.nan_to_num(pts.x, nan=0.0))
        for k in np.unique(idx):
            sel = np.flatnonzero(idx == k)
            sub = pts.take(sel)
            for j in range(order + 1):
                s, la = _compiled(self.derivative_expr(int(k), j)).log_eval(sub)
                sign[j, sel] = s
                logabs[j, sel] = la
        bad = np.isnan(pts.logabs)
        sign[:, bad] = 0.0
        logabs[:, bad] = np.nan
        return sign, logabs

    def values(self, x, order: int = 0) -> np.ndarray:
        """Float values of derivatives 0..order (may overflow to inf)."""
        s, la = self.log_derivs(np.asarray(x, dtype=float), order)
        with np.errstate(over="ignore", invalid="ignore"):
            return s * np.exp(la)

    def __call__(self, x):
        return self.values(x, 0)[0]

    def to_text(self) -> str:
        return to_text(self)


def _is_rational_poly(e: sp.Expr) -> bool:
    if not e.is_polynomial(X):
        return False
    try:
        poly = sp.Poly(e, X)
    except sp.PolynomialError:
        return False
    return poly.domain.is_QQ or poly.domain.is_ZZ


def to_text(f: PiecewiseFn) -> str:
    if f.is_single:
        return expr_to_text(f.expr)
    parts = [f"{p.interval_text()}: {expr_to_text(p.expr)}" for p in f.pieces if p.origin == "given"]
    if f.blend_order is not None:
        parts.append(f"blend: {f.blend_order}")
    return "piecewise(" + "; ".join(parts) + ")"


def equivalent(f: PiecewiseFn, g: PiecewiseFn) -> bool:
    """Same breakpoints and piecewise-identical expressions after normalization."""
    if len(f.pieces) != len(g.pieces):
        return False
    for a, b in zip(f.pieces, g.pieces):
        if (a.lo, a.hi, a.lo_closed, a.hi_closed) != (b.lo, b.hi, b.lo_closed, b.hi_closed):
            return False
        if sp.simplify(sp.expand(a.expr - b.expr)) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# public operations


def differentiate(f: PiecewiseFn, order: int) -> PiecewiseFn:
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if order == 0:
        return f
    return PiecewiseFn(tuple(Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, f.derivative_expr(i, order), p.origin)
                             for i, p in enumerate(f.pieces)), f.blend_order)


def _as_rational(x) -> sp.Rational | None:
    if isinstance(x, (int, Fraction)):
        return sp.Rational(x)
    if isinstance(x, sp.Rational):
        return x
    if isinstance(x, str):
        return sp.Rational(x)
    return None


def evaluate(f: PiecewiseFn, x, precision: int | None = None):
    """Value at ``x`` (left piece on a shared breakpoint).

    Exact ``Fraction`` when ``x`` is rational (int, Fraction, str) and the
    piece is a rational polynomial; otherwise a float, or an ``mpmath.mpf``
    with ``precision`` decimal digits when requested.
    """
    xr = _as_rational(x)
    xf = float(xr) if xr is not None else float(x)
    if not math.isfinite(xf):
        raise ValueError("evaluate needs a finite x")
    k = int(f.piece_index(np.array([xf]))[0])
    if xr is not None:
        # exact placement on rational breakpoints
        k = next(i for i, p in enumerate(f.pieces) if _contains_exact(p, xr))
    e = f.pieces[k].expr
    if xr is not None and _is_rational_poly(e):
        v = e.subs(X, xr)
        return Fraction(int(v.p), int(v.q))
    dps = precision or 30
    with mpmath.workdps(dps):
        xm = mpmath.mpf(xr.p) / xr.q if xr is not None else mpmath.mpf(x)
        v = _compiled(e).mp_eval(xm)
        if v is None:
            raise DomainError("value indeterminate at this precision")
        return v if precision else float(v)


def _contains_exact(p: Piece, x: sp.Rational) -> bool:
    if x < p.lo or x > p.hi:
        return False
    if x == p.lo and not p.lo_closed:
        return False
    if x == p.hi and not p.hi_closed:
        return False
    return True


def smoothness_check(f: PiecewiseFn, order: int, tol: float = 1e-6) -> Verdict:
    """Compare one-sided derivatives 0..order at every interior breakpoint."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if f.is_single:
        return Verdict.holds({"breakpoints": 0, "order": order})
    jumps = []
    worst = 0.0
    for i, (a, b) in enumerate(zip(f.pieces[:-1], f.pieces[1:])):
        bp = a.hi
        for k in range(order + 1):
            try:
                left = complex(sp.N(one_sided_value(f.derivative_expr(i, k), bp, "-"), 30))
                right = complex(sp.N(one_sided_value(f.derivative_expr(i + 1, k), bp, "+"), 30))
            except (TypeError, ValueError, NotImplementedError):
                return Verdict.inconclusive(f"one-sided derivative {k} at {bp} not evaluable")
            if not (math.isfinite(left.real) and math.isfinite(right.real)) or left.imag or right.imag:
                return Verdict.inconclusive(f"one-sided derivative {k} at {bp} not finite")
            scale = max(1.0, abs(left.real), abs(right.real))
            gap = abs(right.real - left.real) / scale
            worst = max(worst, gap)
            if gap > tol:
                jumps.append({"x": float(bp), "order": k, "jump": right.real - left.real,
                              "left": left.real, "right": right.real})
    if jumps:
        return Verdict.fails(jumps, reason="derivative mismatch at breakpoint")
    return Verdict.holds({"breakpoints": len(f.pieces) - 1, "order": order, "max_relative_gap": worst})


def compose(f: PiecewiseFn, phi: PiecewiseFn) -> PiecewiseFn:
    """Symbolic ``f o phi`` for single-piece ``f`` (piece structure of ``phi`` kept)."""
    if not f.is_single:
        raise ValueError("symbolic composition needs a single-piece outer function")
    return phi.map_exprs(lambda e: f.expr.subs(X, e))


def fn(text_or_expr) -> PiecewiseFn:
    """Convenience: parse text, wrap sympy expressions, pass PiecewiseFn through."""
    if isinstance(text_or_expr, PiecewiseFn):
        return text_or_expr
    if isinstance(text_or_expr, str):
        return parse(text_or_expr)
    return PiecewiseFn.single(sp.sympify(text_or_expr).subs(sp.Symbol("x"), X))
