"""Higher-order chain rule (Faa di Bruno) and the Leibniz product rule.

The n-th derivative of ``f o phi`` is

    sum over k_1 + 2 k_2 + ... + n k_n = n of
        n! / (k_1! ... k_n! 1!^k_1 ... n!^k_n) * f^(k)(phi) * prod_i (phi^(i))^k_i

with ``k = k_1 + ... + k_n``. Coefficients are exact Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np
import sympy as sp

from .expr import X, Piece, PiecewiseFn, Points
from .numeric import signed_logsumexp

MAX_ORDER = 20


@dataclass(frozen=True)
class Partition:
    """Solution ``k = (k_1, ..., k_n)`` of ``k_1 + 2 k_2 + ... + n k_n = n``."""

    n: int
    k: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.k) != self.n or sum((i + 1) * ki for i, ki in enumerate(self.k)) != self.n:
            raise ValueError(f"{self.k} is not a partition of {self.n}")

    @property
    def k_total(self) -> int:
        return sum(self.k)


@dataclass(frozen=True)
class FdBTerm:
    partition: Partition
    coefficient: int


def _solutions(n: int, i: int, remaining: int):
    """All (k_i, ..., k_n) with sum_j j*k_j == remaining, k_i largest first."""
    if i > n:
        if remaining == 0:
            yield ()
        return
    for ki in range(remaining // i, -1, -1):
        for rest in _solutions(n, i + 1, remaining - i * ki):
            yield (ki,) + rest


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[Partition, ...]:
    return tuple(Partition(n, k) for k in _solutions(n, 1, n))


def enumerate_partitions(n: int, max_n: int = MAX_ORDER) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic order of ``k``."""
    if not 1 <= n <= max_n:
        raise ValueError(f"n must lie in [1, {max_n}], got {n}")
    return list(_partitions(n))


def fdb_coefficient(p: Partition) -> int:
    den = 1
    for i, ki in enumerate(p.k, start=1):
        den *= factorial(ki) * factorial(i) ** ki
    num = factorial(p.n)
    assert num % den == 0
    return num // den


@lru_cache(maxsize=None)
def fdb_terms(n: int) -> tuple[FdBTerm, ...]:
    return tuple(FdBTerm(p, fdb_coefficient(p)) for p in _partitions(n))


# ---------------------------------------------------------------------------
# symbolic


def compose_derivative_expr(outer, inner: sp.Expr, n: int) -> sp.Expr:
    """n-th derivative of ``outer(inner(x))`` assembled term by term.

    ``outer`` is a sympy expression in ``X`` or an undefined sympy function
    (e.g. ``sp.Function('f')``), in which case derivatives stay symbolic.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")

    def outer_k(k: int) -> sp.Expr:
        if isinstance(outer, sp.FunctionClass):
            y = sp.Dummy("y")
            return sp.diff(outer(y), y, k).subs(y, inner) if k else outer(inner)
        return sp.diff(outer, X, k).subs(X, inner)

    if n == 0:
        return outer_k(0)
    dphi = [inner]
    for _ in range(n):
        dphi.append(sp.diff(dphi[-1], X))
    total = sp.Integer(0)
    for term in fdb_terms(n):
        prod = sp.Integer(term.coefficient) * outer_k(term.partition.k_total)
        for i, ki in enumerate(term.partition.k, start=1):
            if ki:
                prod *= dphi[i] ** ki
        total += prod
    return total


def compose_derivative(f: PiecewiseFn, phi: PiecewiseFn, n: int) -> PiecewiseFn:
    """Symbolic n-th derivative of ``f o phi`` (outer ``f`` single-piece), on ``phi``'s pieces."""
    if not f.is_single:
        raise ValueError("symbolic composition needs a single-piece outer function; use Composition for values")
    pieces = tuple(Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, compose_derivative_expr(f.expr, p.expr, n), p.origin)
                   for p in phi.pieces)
    return PiecewiseFn(pieces, phi.blend_order)


def leibniz_derivative(f: PiecewiseFn, g: PiecewiseFn, n: int) -> PiecewiseFn:
    """``sum_m C(n, m) f^(m) g^(n-m)`` piece by piece (pieces must coincide)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if f.is_single and not g.is_single:
        f = g.map_exprs(lambda _e: f.expr)
    elif g.is_single and not f.is_single:
        g = f.map_exprs(lambda _e: g.expr)
    if [(p.lo, p.hi) for p in f.pieces] != [(p.lo, p.hi) for p in g.pieces]:
        raise ValueError("leibniz_derivative needs matching breakpoints")
    pieces = []
    for i, p in enumerate(f.pieces):
        e = sum((comb(n, m) * f.derivative_expr(i, m) * g.derivative_expr(i, n - m) for m in range(n + 1)),
                sp.Integer(0))
        pieces.append(Piece(p.lo, p.hi, p.lo_closed, p.hi_closed, e, p.origin))
    return PiecewiseFn(tuple(pieces), f.blend_order)


# ---------------------------------------------------------------------------
# pointwise (log domain)


class Composition:
    """``outer o inner`` evaluated pointwise through the chain rule.

    Each ``inner^(i)`` is evaluated once per point, ``outer^(k)`` once at
    ``inner(x)``, and the terms are folded in the log domain, so huge inner
    values (``inner = exp(x^2)``) do not overflow.
    """

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    def log_derivs(self, pts, order: int) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(pts, Points):
            pts = Points.from_float(pts)
        s_in, l_in = self.inner.log_derivs(pts, order)
        y = Points.from_log(s_in[0], l_in[0])
        s_out, l_out = self.outer.log_derivs(y, order)
        n_pts = len(pts)
        sign = np.zeros((order + 1, n_pts))
        logabs = np.full((order + 1, n_pts), -np.inf)
        sign[0], logabs[0] = s_out[0], l_out[0]
        for n in range(1, order + 1):
            terms = fdb_terms(n)
            ts = np.empty((len(terms), n_pts))
            tl = np.empty((len(terms), n_pts))
            for r, term in enumerate(terms):
                k = term.partition.k_total
                s = s_out[k].copy()
                la = l_out[k] + np.log(term.coefficient)
                for i, ki in enumerate(term.partition.k, start=1):
                    if ki:
                        s = s * s_in[i] ** ki
                        with np.errstate(invalid="ignore"):
                            la = la + ki * l_in[i]
                la = np.where(s == 0, np.where(np.isnan(la), la, -np.inf), la)
                ts[r], tl[r] = s, la
            sign[n], logabs[n] = signed_logsumexp(ts, tl, axis=0)
        return sign, logabs

    def values(self, x, order: int = 0) -> np.ndarray:
        s, la = self.log_derivs(np.asarray(x, dtype=float), order)
        with np.errstate(over="ignore", invalid="ignore"):
            return s * np.exp(la)

    def __call__(self, x):
        return self.values(x, 0)[0]


def compose_derivative_at(f, phi, n: int, x) -> np.ndarray:
    """Float values of ``(f o phi)^(n)`` at ``x`` via the pointwise path."""
    return Composition(f, phi).values(np.atleast_1d(np.asarray(x, dtype=float)), n)[n]


def bell_number(n: int) -> int:
    """Bell numbers from the recurrence B_{m+1} = sum_k C(m, k) B_k (test oracle helper)."""
    bell = [1]
    for m in range(n):
        bell.append(sum(comb(m, k) * bell[k] for k in range(m + 1)))
    return bell[n]
