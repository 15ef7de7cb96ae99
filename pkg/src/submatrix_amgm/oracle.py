"""Slow reference implementations used to check the fast paths.

Nothing here shares code with the scanning machinery. Arithmetic means are
exact rationals; anything involving a root or a logarithm is carried as an
outward-rounded interval whose precision is raised until the comparison
being asked about is decided.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .core import NonnegMatrix, SubmatrixSelection, Verdict
from .errors import InputError, NonpositiveEntry, PrecisionExhausted, RangeViolation

ORACLE_MAX_DIM = 8
START_PREC = 64
MAX_PREC = 8192


def _ctx(prec: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def _iv_rational(ctx, q: Fraction):
    q = Fraction(q)
    if q.denominator == 1:
        return ctx.mpf(q.numerator)
    return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)


def _mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    return (-1 if sign else 1) * Fraction(int(man)) * Fraction(2) ** exp


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lower, upper] known to contain a real value."""

    lower: mpmath.mpf
    upper: mpmath.mpf

    @classmethod
    def of(cls, x) -> "Enclosure":
        lo, hi = x._mpi_
        return cls(mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi))

    @classmethod
    def point(cls, q) -> "Enclosure":
        # exact only for dyadic values; rationals go through an interval
        if isinstance(q, Fraction) and q.denominator & (q.denominator - 1):
            return cls.of(_iv_rational(_ctx(MAX_PREC), q))
        v = mpmath.mpf(q.numerator) / q.denominator if isinstance(q, Fraction) else mpmath.mpf(q)
        return cls(v, v)

    @property
    def width(self) -> mpmath.mpf:
        return self.upper - self.lower

    @property
    def mid(self) -> float:
        return float((self.lower + self.upper) / 2)

    def contains(self, x) -> bool:
        """Exact membership test; floats and Fractions are compared without rounding."""
        if isinstance(x, (int, float, Fraction)):
            q = Fraction(x)
            return _mpf_to_fraction(self.lower) <= q <= _mpf_to_fraction(self.upper)
        return self.lower <= x <= self.upper

    def widened(self, rel: float) -> tuple[float, float]:
        """Float bounds grown by ``rel`` relative to the magnitude."""
        lo, hi = float(self.lower), float(self.upper)
        pad = rel * max(abs(lo), abs(hi))
        return lo - pad, hi + pad

    def as_floats(self) -> tuple[float, float]:
        return float(self.lower), float(self.upper)


def _check_desk_scale(B: NonnegMatrix, limit: int = ORACLE_MAX_DIM) -> None:
    if B.m > limit or B.n > limit:
        raise InputError(f"oracle limited to {limit}x{limit}, got {B.m}x{B.n}")


def _grid(B: NonnegMatrix) -> list[list[Fraction]]:
    return [list(r) for r in B.as_exact().rows()]


def _selections(m: int, n: int, k: int, l: int):
    return [
        (rows, cols)
        for rows in itertools.combinations(range(m), k)
        for cols in itertools.combinations(range(n), l)
    ]


@dataclass(frozen=True)
class OracleTheorem:
    lhs: Enclosure
    rhs: Enclosure
    # "greater", "equal" or "less": lhs compared to rhs
    relation: str
    constant: bool
    precision: int
    arithmetic_means: tuple[Fraction, ...]

    @property
    def verdict(self) -> Verdict:
        if self.relation == "less":
            return Verdict.VIOLATED
        if self.relation == "equal" and self.constant:
            return Verdict.EQUALITY
        return Verdict.HOLDS


def brute_theorem(
    B: NonnegMatrix, k: int, l: int, start_prec: int = START_PREC, max_prec: int = MAX_PREC
) -> OracleTheorem:
    """Decide lhs vs rhs of the mixed-mean inequality by direct enumeration.

    Works for any 1 <= k <= m, 1 <= l <= n; the range condition is not
    enforced so out-of-range counterexamples can be adjudicated too.
    """
    _check_desk_scale(B)
    m, n = B.m, B.n
    if not (1 <= k <= m and 1 <= l <= n):
        raise InputError(f"need 1 <= k <= m and 1 <= l <= n, got k={k}, l={l}")
    grid = _grid(B)
    flat = [v for r in grid for v in r]
    constant = all(v == flat[0] for v in flat)
    size = k * l
    means: list[Fraction] = []
    products: list[Fraction] = []
    for rows, cols in _selections(m, n, k, l):
        vals = [grid[i][j] for i in rows for j in cols]
        means.append(sum(vals, Fraction(0)) / size)
        products.append(math.prod(vals, start=Fraction(1)))
    N = len(means)
    lhs_zero = any(a == 0 for a in means)
    rhs_zero = all(p == 0 for p in products)

    prec = start_prec
    while True:
        ctx = _ctx(prec)
        if lhs_zero:
            lhs = ctx.mpf(0)
        else:
            lhs = ctx.exp(ctx.fsum(ctx.log(_iv_rational(ctx, a)) for a in means) / N)
        g_total = ctx.mpf(0)
        for p in products:
            if p != 0:
                g_total += ctx.exp(ctx.log(_iv_rational(ctx, p)) / size)
        rhs = g_total / N
        L, R = Enclosure.of(lhs), Enclosure.of(rhs)
        if constant or (lhs_zero and rhs_zero):
            relation = "equal"
        elif L.lower > R.upper:
            relation = "greater"
        elif L.upper < R.lower:
            relation = "less"
        else:
            relation = None
        if relation is not None:
            return OracleTheorem(L, R, relation, constant, prec, tuple(means))
        if prec >= max_prec:
            raise PrecisionExhausted(
                f"lhs and rhs enclosures still overlap at {prec} bits: {L} vs {R}"
            )
        prec *= 2


@dataclass(frozen=True)
class SubsetResult:
    lhs: float
    rhs: float
    holds: bool


def subset_inequality_1(x: Sequence[float], k: int, tolerance: float = 1e-9) -> SubsetResult:
    """Mixed-mean inequality over k-subsets of a positive sequence.

    lhs is the geometric mean of the subset arithmetic means, rhs the
    arithmetic mean of the subset geometric means. Evaluated at 50 digits.
    """
    vals = list(x)
    n = len(vals)
    if not 2 * k > n or k > n:
        raise RangeViolation(f"need n/2 < k <= n, got k={k}, n={n}")
    if any(v <= 0 for v in vals):
        raise NonpositiveEntry("subset inequality requires positive values")
    with mpmath.workdps(50):
        xs = [mpmath.mpf(v) if not isinstance(v, Fraction) else mpmath.mpf(v.numerator) / v.denominator for v in vals]
        log_a = []
        g = []
        for subset in itertools.combinations(xs, k):
            log_a.append(mpmath.log(mpmath.fsum(subset) / k))
            g.append(mpmath.exp(mpmath.fsum(mpmath.log(s) for s in subset) / k))
        C = len(g)
        lhs = float(mpmath.exp(mpmath.fsum(log_a) / C))
        rhs = float(mpmath.fsum(g) / C)
    return SubsetResult(lhs, rhs, lhs >= rhs - tolerance * max(lhs, rhs))


def _intersection_values(grid, base_rows, base_cols, rows, cols):
    rr = [i for i in base_rows if i in rows]
    cc = [j for j in base_cols if j in cols]
    return [grid[i][j] for i in rr for j in cc]


def brute_lemma(
    B: NonnegMatrix, base: SubmatrixSelection, r, mode: str = "exact", prec: int = 256
):
    """Residual of the power-mean averaging identity for one base submatrix.

    ``mode='exact'`` needs an integer ``r >= 1`` and returns a ``Fraction``
    (the identity says it is 0). ``mode='enclosure'`` accepts any ``r >= 0``
    and returns an ``Enclosure`` that should contain 0. At ``r == 0`` the
    identity is compared in log form; with zero entries both sides are 0.
    """
    _check_desk_scale(B, 6)
    base.check_against(B)
    m, n = B.m, B.n
    k, l = base.shape
    if not (2 * k > m and 2 * l > n):
        raise RangeViolation(f"need 2k > m and 2l > n, got k={k}, l={l} for {m}x{n}")
    grid = _grid(B)
    br, bc = base.rows.indices, base.cols.indices
    partners = _selections(m, n, k, l)
    N = len(partners)
    base_vals = [grid[i][j] for i in br for j in bc]

    if mode == "exact":
        if r < 1 or not float(r).is_integer():
            raise InputError(f"exact lemma check needs an integer r >= 1, got {r}")
        ri = int(r)
        lhs = sum((v ** ri for v in base_vals), Fraction(0)) / len(base_vals)
        rhs = Fraction(0)
        for rows, cols in partners:
            vals = _intersection_values(grid, br, bc, rows, cols)
            rhs += sum((v ** ri for v in vals), Fraction(0)) / len(vals)
        return lhs - rhs / N

    if mode != "enclosure":
        raise InputError(f"unknown lemma oracle mode {mode!r}")
    if r < 0:
        raise InputError(f"r must be >= 0, got {r}")
    ctx = _ctx(prec)
    if r == 0:
        if any(v == 0 for v in base_vals):
            # g of the base is 0 and so is g of the intersection with itself
            return Enclosure.point(Fraction(0))
        lhs = ctx.fsum(ctx.log(_iv_rational(ctx, v)) for v in base_vals) / len(base_vals)
        total = ctx.mpf(0)
        for rows, cols in partners:
            vals = _intersection_values(grid, br, bc, rows, cols)
            total += ctx.fsum(ctx.log(_iv_rational(ctx, v)) for v in vals) / len(vals)
        return Enclosure.of(lhs - total / N)

    rr = ctx.mpf(r)

    def powered(v):
        return ctx.mpf(0) if v == 0 else ctx.exp(rr * ctx.log(_iv_rational(ctx, v)))

    lhs = ctx.fsum(powered(v) for v in base_vals) / len(base_vals)
    total = ctx.mpf(0)
    for rows, cols in partners:
        vals = _intersection_values(grid, br, bc, rows, cols)
        total += ctx.fsum(powered(v) for v in vals) / len(vals)
    return Enclosure.of(lhs - total / N)
