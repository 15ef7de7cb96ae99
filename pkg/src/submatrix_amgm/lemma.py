"""Averaging identity over positional intersections, and the proof chain.

For a base submatrix X (rows R, columns C) and every partner submatrix Y of
the same shape, X ∩ Y is the entry set on (R ∩ R') × (C ∩ C'). In the valid
range every such intersection is nonempty, and the r-th power of the power
mean of X equals the average over all partners of the r-th power of the
power mean of X ∩ Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combinatorics import DEFAULT_CAP, check_cap, enumerate_lex
from .core import EXACT, FLOAT64, NonnegMatrix, RangeParams, ScalarBackend, SubmatrixSelection
from .errors import EmptyIntersection, InputError, NonpositiveEntry
from .means import power_mean_pow

TRACE_PAIR_CAP = 4_000_000


def _partners(m: int, n: int, k: int, l: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    cols = list(enumerate_lex(n, l))
    return [(r, c) for r in enumerate_lex(m, k) for c in cols]


def _require_range(m: int, n: int, k: int, l: int) -> None:
    RangeParams(m, n, k, l).require_valid()


@dataclass(frozen=True)
class PartnerRecord:
    partner_id: int
    row_overlap: int
    col_overlap: int
    mean_pow: object  # (m_r(X ∩ Y))**r, or the mean log when r == 0


@dataclass(frozen=True)
class IntersectionMeans:
    base: SubmatrixSelection
    r: float
    records: tuple[PartnerRecord, ...]


def intersection_means(B: NonnegMatrix, base: SubmatrixSelection, r) -> IntersectionMeans:
    """Per-partner r-th power means of the positional intersections with ``base``.

    At ``r == 0`` each record holds the mean log of the intersection (or
    ``-inf`` when it contains a zero).
    """
    base.check_against(B)
    k, l = base.shape
    _require_range(B.m, B.n, k, l)
    records = []
    for pid, (rows, cols) in enumerate(_partners(B.m, B.n, k, l)):
        rr = tuple(i for i in base.rows if i in rows)
        cc = tuple(j for j in base.cols if j in cols)
        if not rr or not cc:
            raise EmptyIntersection(f"base {base} and partner {(rows, cols)} do not overlap")
        vals = [B[i, j] for i in rr for j in cc]
        if r == 0:
            value = -math.inf if any(v == 0 for v in vals) else math.fsum(math.log(v) for v in vals) / len(vals)
        else:
            value = power_mean_pow(vals, r)
        records.append(PartnerRecord(pid, len(rr), len(cc), value))
    return IntersectionMeans(base, r, tuple(records))


@dataclass(frozen=True)
class LemmaResult:
    """``residual = lhs - rhs``; at r == 0 both sides are mean logs."""

    lhs: object
    rhs: object
    residual: object
    r: float

    @property
    def relative_residual(self) -> float:
        scale = max(abs(float(self.lhs)), abs(float(self.rhs)), 1.0 if self.r == 0 else 0.0)
        return 0.0 if scale == 0 else abs(float(self.residual)) / scale


def lemma_identity(
    B: NonnegMatrix, base: SubmatrixSelection, r=1, backend: ScalarBackend = FLOAT64
) -> LemmaResult:
    """Compare the base's r-th power mean (to the r) with the partner average.

    Exact mode needs an integer ``r >= 1`` and returns ``Fraction`` values;
    the residual is then exactly zero. At ``r == 0`` the comparison is made
    on logs; a zero entry makes both geometric means 0 and the residual 0.
    """
    if r < 0:
        raise InputError(f"r must be >= 0, got {r}")
    if backend.exact:
        if r < 1 or not float(r).is_integer():
            raise InputError(f"exact mode needs an integer r >= 1, got {r}")
        B = B.as_exact()
        r = int(r)
    means = intersection_means(B, base, r)
    N = len(means.records)
    base_vals = base.entries(B)
    if r == 0:
        if any(v == 0 for v in base_vals):
            return LemmaResult(0.0, 0.0, 0.0, 0)
        lhs = math.fsum(math.log(v) for v in base_vals) / len(base_vals)
        rhs = math.fsum(rec.mean_pow for rec in means.records) / N
        return LemmaResult(lhs, rhs, lhs - rhs, 0)
    lhs = power_mean_pow(base_vals, r)
    if backend.exact:
        rhs = sum((rec.mean_pow for rec in means.records), Fraction(0)) / N
    else:
        rhs = math.fsum(rec.mean_pow for rec in means.records) / N
    return LemmaResult(lhs, rhs, lhs - rhs, r)


@dataclass(frozen=True)
class CoefficientTable:
    """Weight each base position receives in the partner average."""

    m: int
    n: int
    k: int
    l: int
    base: SubmatrixSelection
    coefficients: dict
    expected: Fraction

    @property
    def total(self) -> Fraction:
        return sum(self.coefficients.values(), Fraction(0))

    @property
    def ok(self) -> bool:
        return all(c == self.expected for c in self.coefficients.values())


def coefficient_check(
    m: int, n: int, k: int, l: int, base: SubmatrixSelection | None = None
) -> CoefficientTable:
    """Enumerate partners and add up each base position's exact weight.

    A partner Y contributes 1/(|R ∩ R'|·|C ∩ C'|) to every position of the
    intersection; the total is divided by the partner count.
    """
    _require_range(m, n, k, l)
    if base is None:
        base = SubmatrixSelection.of(m, n, range(k), range(l))
    if base.shape != (k, l) or base.rows.universe != m or base.cols.universe != n:
        raise InputError(f"base {base} is not a {k}x{l} selection of a {m}x{n} matrix")
    coeff = {(p, q): Fraction(0) for p in base.rows for q in base.cols}
    partners = _partners(m, n, k, l)
    for rows, cols in partners:
        rr = [i for i in base.rows if i in rows]
        cc = [j for j in base.cols if j in cols]
        if not rr or not cc:
            raise EmptyIntersection(f"base {base} and partner {(rows, cols)} do not overlap")
        w = Fraction(1, len(rr) * len(cc))
        for p in rr:
            for q in cc:
                coeff[p, q] += w
    N = len(partners)
    coeff = {pos: c / N for pos, c in coeff.items()}
    return CoefficientTable(m, n, k, l, base, coeff, Fraction(1, k * l))


@dataclass(frozen=True)
class HolderResult:
    left: float
    right: float
    holds: bool


def holder_mixed(x: Sequence[Sequence[float]], tolerance: float = 1e-12) -> HolderResult:
    """Mixed-mean form of Hölder's inequality on a positive grid.

    ``left = sum_k (prod_j x[j][k]) ** (1/rows)`` and
    ``right = (prod_j sum_k x[j][k]) ** (1/rows)``; left never exceeds right.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise InputError("holder_mixed expects a nonempty 2-D grid")
    if np.any(a <= 0):
        raise NonpositiveEntry("holder_mixed requires positive entries")
    rows = a.shape[0]
    logs = np.log(a)
    left = math.fsum(math.exp(math.fsum(logs[:, c]) / rows) for c in range(a.shape[1]))
    right = math.exp(math.fsum(math.log(math.fsum(a[j])) for j in range(rows)) / rows)
    return HolderResult(left, right, left <= right + tolerance * right)


# -- proof chain ------------------------------------------------------------------


@dataclass(frozen=True)
class TraceLink:
    name: str
    left: float
    right: float
    # signed slack in the direction the link claims; >= 0 means it holds
    relative_gap: float
    holds: bool


@dataclass
class ProofTrace:
    """Every intermediate of the chain lhs >= middle >= holder_side = rhs.

    Per base i: ``base_means[i]`` is a of B_i, ``decomposition[i]`` the
    partner average of intersection arithmetic means, ``lower_bounds[i]``
    the partner average of intersection geometric means.
    """

    params: RangeParams
    base_means: np.ndarray
    decomposition: np.ndarray
    lower_bounds: np.ndarray
    lhs: float
    middle: float
    holder_side: float
    rhs: float
    links: list[TraceLink] = field(default_factory=list)
    pair_count: int = 0

    @property
    def ok(self) -> bool:
        return all(link.holds for link in self.links)

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "middle": self.middle,
            "holder_side": self.holder_side,
            "rhs": self.rhs,
            "pair_count": self.pair_count,
            "links": [link.__dict__ for link in self.links],
        }


def _subset_masks(n: int, k: int) -> np.ndarray:
    subsets = list(enumerate_lex(n, k))
    mask = np.zeros((len(subsets), n))
    for i, s in enumerate(subsets):
        mask[i, list(s)] = 1.0
    return mask


def _pair_tables(X: np.ndarray, k: int, l: int):
    """Sums and sizes of every positional intersection, shaped (N, N)."""
    m, n = X.shape
    R = _subset_masks(m, k)
    C = _subset_masks(n, l)
    nr, nc = len(R), len(C)
    RI = (R[:, None, :] * R[None, :, :]).reshape(nr * nr, m)
    CI = (C[:, None, :] * C[None, :, :]).reshape(nc * nc, n)
    T = (RI @ X @ CI.T).reshape(nr, nr, nc, nc)
    sizes = np.outer(RI.sum(axis=1), CI.sum(axis=1)).reshape(nr, nr, nc, nc)
    # base i = (a, c), partner j = (b, d)
    T = T.transpose(0, 2, 1, 3).reshape(nr * nc, nr * nc)
    sizes = sizes.transpose(0, 2, 1, 3).reshape(nr * nc, nr * nc)
    return T, sizes


def _link(name: str, left: float, right: float, tol: float, equality: bool = False) -> TraceLink:
    scale = max(abs(left), abs(right))
    gap = 0.0 if scale == 0 else (left - right) / scale
    holds = abs(gap) <= tol if equality else gap >= -tol
    return TraceLink(name, float(left), float(right), float(gap), bool(holds))


def proof_trace(
    B: NonnegMatrix,
    k: int,
    l: int,
    backend: ScalarBackend = FLOAT64,
    tolerance: float = 1e-12,
    cap: int | None = DEFAULT_CAP,
) -> ProofTrace:
    """Compute and check each link of the proof chain on a positive matrix.

    Links, in order: base mean equals the partner average of intersection
    means (every base); base log-geometric mean equals the partner average of
    intersection log-geometric means (every base); AM >= GM on every
    intersection; base mean >= partner average of intersection geometric
    means (every base); lhs >= middle; middle >= holder side; holder side
    equals rhs. With an exact backend the first link is checked in rationals.
    """
    params = RangeParams(B.m, B.n, k, l)
    params.require_valid()
    if any(v <= 0 for v in B.entries):
        raise NonpositiveEntry("proof trace needs strictly positive entries")
    N = params.submatrix_count
    check_cap(N, cap)
    check_cap(N * N, TRACE_PAIR_CAP)

    X = B.to_array()
    S, sizes = _pair_tables(X, k, l)
    LS, _ = _pair_tables(np.log(X), k, l)
    pair_a = S / sizes
    pair_log_g = LS / sizes
    pair_g = np.exp(pair_log_g)

    diag = np.arange(N)
    base_means = pair_a[diag, diag]
    base_log_g = pair_log_g[diag, diag]
    decomposition = pair_a.mean(axis=1)
    lower_bounds = pair_g.mean(axis=1)

    lhs = math.exp(math.fsum(np.log(base_means)) / N)
    middle = math.exp(math.fsum(np.log(pair_g.sum(axis=1))) / N) / N
    holder_side = math.fsum(np.exp(pair_log_g.mean(axis=1))) / N
    rhs = math.fsum(np.exp(base_log_g)) / N

    links = []
    if backend.exact:
        links.append(_exact_decomposition_link(B, k, l))
    else:
        worst = int(np.argmax(np.abs(base_means - decomposition) / base_means))
        links.append(_link("mean_decomposition", base_means[worst], decomposition[worst], tolerance, True))
    log_dev = np.abs(base_log_g - pair_log_g.mean(axis=1))
    worst = int(np.argmax(log_dev))
    links.append(
        TraceLink(
            "log_decomposition",
            float(base_log_g[worst]),
            float(pair_log_g[worst].mean()),
            -float(log_dev[worst]),
            bool(log_dev[worst] <= tolerance),
        )
    )
    amgm = (pair_a - pair_g) / pair_a
    i, j = np.unravel_index(int(np.argmin(amgm)), amgm.shape)
    links.append(_link("pairwise_amgm", float(pair_a[i, j]), float(pair_g[i, j]), tolerance))
    per_base = (base_means - lower_bounds) / base_means
    worst = int(np.argmin(per_base))
    links.append(_link("per_base_bound", float(base_means[worst]), float(lower_bounds[worst]), tolerance))
    links.append(_link("lhs_over_middle", lhs, middle, tolerance))
    links.append(_link("holder_step", middle, holder_side, tolerance))
    links.append(_link("holder_equals_rhs", holder_side, rhs, tolerance, True))

    return ProofTrace(
        params=params,
        base_means=base_means,
        decomposition=decomposition,
        lower_bounds=lower_bounds,
        lhs=lhs,
        middle=middle,
        holder_side=holder_side,
        rhs=rhs,
        links=links,
        pair_count=N * N,
    )


def _exact_decomposition_link(B: NonnegMatrix, k: int, l: int) -> TraceLink:
    Bx = B.as_exact()
    partners = _partners(B.m, B.n, k, l)
    worst = Fraction(0)
    worst_pair = (Fraction(0), Fraction(0))
    for rows, cols in partners:
        base = SubmatrixSelection.of(B.m, B.n, rows, cols)
        res = lemma_identity(Bx, base, 1, EXACT)
        if abs(res.residual) >= worst:
            worst, worst_pair = abs(res.residual), (res.lhs, res.rhs)
    return TraceLink(
        "mean_decomposition", float(worst_pair[0]), float(worst_pair[1]), -float(worst), worst == 0
    )
