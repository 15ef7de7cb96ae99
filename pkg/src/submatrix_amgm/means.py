"""Power means and per-submatrix statistics.

The fast scan keeps one column profile per row subset (per-column sums,
log-sums and zero counts over the selected rows) and updates it by single
row swaps. Column subsets are then folded in with one indicator-matrix
product per batch of row subsets.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .combinatorics import (
    DEFAULT_CAP,
    SwapStep,
    check_cap,
    enumerate_lex,
    enumerate_revolving_door,
    partition_ranks,
    rank,
)
from .core import NonnegMatrix, Scalar, SubmatrixSelection
from .errors import EmptyInput, InputError, NegativeEntry

_BATCH_ELEMENTS = 1 << 16


def _check_values(values: Sequence) -> list:
    vals = list(values)
    if not vals:
        raise EmptyInput("power mean of an empty sequence")
    if any(v < 0 for v in vals):
        raise NegativeEntry("power mean requires nonnegative values")
    return vals


def _check_exponent(r) -> None:
    if r < 0:
        raise InputError(f"power mean exponent must be >= 0, got {r}")


def power_mean(values: Sequence[Scalar], r: float = 1.0) -> Scalar:
    """``((sum x**r) / k) ** (1/r)``; ``r == 0`` gives the geometric mean.

    Exact ``Fraction`` input with ``r == 1`` stays exact.
    """
    vals = _check_values(values)
    _check_exponent(r)
    k = len(vals)
    if r == 0:
        return geometric_mean(vals)
    if r == 1:
        if all(isinstance(v, Fraction) for v in vals):
            return sum(vals, Fraction(0)) / k
        return math.fsum(float(v) for v in vals) / k
    return (math.fsum(float(v) ** r for v in vals) / k) ** (1.0 / r)


def power_mean_pow(values: Sequence[Scalar], r) -> Scalar:
    """The r-th power of the power mean, i.e. the plain mean of ``x**r``.

    Exact for ``Fraction`` values and a positive integer ``r``.
    """
    vals = _check_values(values)
    _check_exponent(r)
    if r == 0:
        raise InputError("power_mean_pow is undefined at r = 0; use geometric_mean")
    if all(isinstance(v, Fraction) for v in vals) and float(r).is_integer():
        ri = int(r)
        return sum((v ** ri for v in vals), Fraction(0)) / len(vals)
    return math.fsum(float(v) ** r for v in vals) / len(vals)


def geometric_mean(values: Sequence[Scalar]) -> float:
    vals = _check_values(values)
    if any(v == 0 for v in vals):
        return 0.0
    return math.exp(math.fsum(math.log(v) for v in vals) / len(vals))


@dataclass(frozen=True)
class SubmatrixStats:
    entry_count: int
    sum: Scalar
    log_sum: float
    zero_count: int

    @property
    def arithmetic_mean(self) -> Scalar:
        return self.sum / self.entry_count

    @property
    def geometric_mean(self) -> float:
        if self.zero_count:
            return 0.0
        return math.exp(self.log_sum / self.entry_count)


def submatrix_stats(B: NonnegMatrix, sel: SubmatrixSelection) -> SubmatrixStats:
    vals = sel.entries(B)
    positive = [v for v in vals if v > 0]
    if B.exact:
        total = sum(vals, Fraction(0))
    else:
        total = math.fsum(vals)
    return SubmatrixStats(
        entry_count=len(vals),
        sum=total,
        log_sum=math.fsum(math.log(v) for v in positive),
        zero_count=len(vals) - len(positive),
    )


class _Neumaier:
    """Compensated running sum over a float vector."""

    def __init__(self, size: int):
        self.s = np.zeros(size)
        self.c = np.zeros(size)

    def add(self, x: np.ndarray) -> None:
        t = self.s + x
        big = np.abs(self.s) >= np.abs(x)
        self.c += np.where(big, (self.s - t) + x, (x - t) + self.s)
        self.s = t

    @property
    def value(self) -> np.ndarray:
        return self.s + self.c


class RowSetColumnProfile:
    """Per-column sum, log-sum and zero count over a set of rows.

    Float matrices use compensated vector updates; exact matrices keep
    ``Fraction`` sums so the arithmetic part never rounds.
    """

    def __init__(self, B: NonnegMatrix, rows: Sequence[int]):
        self.matrix = B
        self.rows = tuple(sorted(rows))
        self.exact = B.exact
        self._table = B.rows()
        self._logs = [[math.log(v) if v > 0 else 0.0 for v in r] for r in self._table]
        self._zeros = [[1 if v == 0 else 0 for v in r] for r in self._table]
        n = B.n
        if self.exact:
            self._sum = [Fraction(0)] * n
        else:
            self._sum_acc = _Neumaier(n)
        self._log_acc = _Neumaier(n)
        self._zero = np.zeros(n, dtype=np.int64)
        for i in self.rows:
            self._add_row(i, +1)

    def _add_row(self, i: int, sign: int) -> None:
        if self.exact:
            self._sum = [a + sign * b for a, b in zip(self._sum, self._table[i])]
        else:
            self._sum_acc.add(sign * np.asarray(self._table[i], dtype=np.float64))
        self._log_acc.add(sign * np.asarray(self._logs[i]))
        self._zero += sign * np.asarray(self._zeros[i], dtype=np.int64)

    def apply_swap(self, step: SwapStep) -> None:
        self.rows = step.apply(self.rows)
        self._add_row(step.removed, -1)
        self._add_row(step.inserted, +1)

    def move_to(self, rows: Sequence[int]) -> None:
        """Reach ``rows`` by a sequence of single swaps."""
        new = tuple(rows)
        removed = [i for i in self.rows if i not in new]
        inserted = [i for i in new if i not in self.rows]
        for a, b in zip(removed, inserted):
            self.apply_swap(SwapStep(a, b))

    @property
    def sums(self):
        return list(self._sum) if self.exact else self._sum_acc.value

    @property
    def log_sums(self) -> np.ndarray:
        return self._log_acc.value

    @property
    def zero_counts(self) -> np.ndarray:
        return self._zero.copy()

    @classmethod
    def from_scratch(cls, B: NonnegMatrix, rows: Sequence[int]) -> "RowSetColumnProfile":
        return cls(B, rows)


def column_indicator(n: int, l: int) -> np.ndarray:
    """C(n, l) × n 0/1 matrix, one row per column subset in lex order."""
    subsets = list(enumerate_lex(n, l))
    ind = np.zeros((len(subsets), n))
    for r, s in enumerate(subsets):
        ind[r, list(s)] = 1.0
    return ind


@dataclass
class ScanBlock:
    """Statistics for a batch of row subsets crossed with every column subset.

    Arrays are shaped (len(row_ranks), C(n, l)); columns follow lex order.
    """

    row_ranks: np.ndarray
    sums: np.ndarray
    log_sums: np.ndarray
    zero_counts: np.ndarray
    entry_count: int

    @property
    def arithmetic_means(self) -> np.ndarray:
        return self.sums / self.entry_count

    @property
    def geometric_means(self) -> np.ndarray:
        g = np.exp(self.log_sums / self.entry_count)
        return np.where(self.zero_counts > 0, 0.0, g)


def _row_sequence(m: int, k: int, start: int, stop: int, order: str) -> Iterator[tuple[int, ...]]:
    if order == "revolving":
        for s, _ in enumerate_revolving_door(m, k):
            yield s
    else:
        yield from enumerate_lex(m, k, start, stop)


def iter_blocks(
    B: NonnegMatrix,
    k: int,
    l: int,
    start: int = 0,
    stop: int | None = None,
    order: str = "lex",
) -> Iterator[ScanBlock]:
    """Float scan over row ranks [start, stop) (all rows for ``order='revolving'``)."""
    if B.exact:
        B = B.as_float()
    m, n = B.m, B.n
    cind = column_indicator(n, l)
    batch = max(1, _BATCH_ELEMENTS // cind.shape[0])
    profile: RowSetColumnProfile | None = None
    ranks, sums, logs, zeros = [], [], [], []

    def flush() -> ScanBlock:
        blk = ScanBlock(
            row_ranks=np.asarray(ranks, dtype=np.int64),
            sums=np.asarray(sums) @ cind.T,
            log_sums=np.asarray(logs) @ cind.T,
            zero_counts=np.asarray(zeros, dtype=np.float64) @ cind.T,
            entry_count=k * l,
        )
        ranks.clear(), sums.clear(), logs.clear(), zeros.clear()
        return blk

    for rows in _row_sequence(m, k, start, stop, order):
        if profile is None:
            profile = RowSetColumnProfile(B, rows)
        else:
            profile.move_to(rows)
        ranks.append(rank(rows, m))
        sums.append(profile.sums)
        logs.append(profile.log_sums)
        zeros.append(profile.zero_counts)
        if len(ranks) >= batch:
            yield flush()
    if ranks:
        yield flush()


def _stats_from_block(blk: ScanBlock, col_count: int) -> Iterator[tuple[int, SubmatrixStats]]:
    for bi, rr in enumerate(blk.row_ranks):
        for cr in range(col_count):
            yield int(rr) * col_count + cr, SubmatrixStats(
                entry_count=blk.entry_count,
                sum=float(blk.sums[bi, cr]),
                log_sum=float(blk.log_sums[bi, cr]),
                zero_count=int(round(blk.zero_counts[bi, cr])),
            )


def _exact_scan(B: NonnegMatrix, k: int, l: int) -> Iterator[tuple[int, SubmatrixStats]]:
    m, n = B.m, B.n
    col_subsets = list(enumerate_lex(n, l))
    profile: RowSetColumnProfile | None = None
    sid = 0
    for rows in enumerate_lex(m, k):
        if profile is None:
            profile = RowSetColumnProfile(B, rows)
        else:
            profile.move_to(rows)
        sums, logs, zc = profile.sums, profile.log_sums, profile.zero_counts
        for cols in col_subsets:
            yield sid, SubmatrixStats(
                entry_count=k * l,
                sum=sum((sums[j] for j in cols), Fraction(0)),
                log_sum=math.fsum(logs[j] for j in cols),
                zero_count=int(sum(zc[j] for j in cols)),
            )
            sid += 1


def _check_kl(B: NonnegMatrix, k: int, l: int, cap: int | None) -> int:
    if not (1 <= k <= B.m and 1 <= l <= B.n):
        raise InputError(f"need 1 <= k <= m and 1 <= l <= n, got k={k}, l={l} for {B.m}x{B.n}")
    count = math.comb(B.m, k) * math.comb(B.n, l)
    check_cap(count, cap)
    return count


def scan_all_submatrices(
    B: NonnegMatrix, k: int, l: int, cap: int | None = DEFAULT_CAP
) -> Iterator[tuple[int, SubmatrixStats]]:
    """Yield ``(submatrix_id, stats)`` for every k×l submatrix in canonical ID order.

    The ID is ``rank(rows) * C(n, l) + rank(cols)`` with lexicographic ranks.
    Exact matrices produce exact ``Fraction`` sums.
    """
    _check_kl(B, k, l, cap)
    if B.exact:
        yield from _exact_scan(B, k, l)
        return
    col_count = math.comb(B.n, l)
    for blk in iter_blocks(B, k, l):
        yield from _stats_from_block(blk, col_count)


@dataclass(frozen=True)
class ScanAggregate:
    """Associative summary of a float scan. ``log_a_sum`` skips zero means."""

    count: int
    log_a_sum: float
    a_zero_count: int
    g_sum: float
    g_zero_count: int


def _aggregate_blocks(blocks: Iterator[ScanBlock]) -> tuple[list[float], int, list[float], int, int]:
    log_parts: list[float] = []
    g_parts: list[float] = []
    a_zero = g_zero = count = 0
    for blk in blocks:
        a = blk.arithmetic_means
        positive = a > 0
        a_zero += int(a.size - np.count_nonzero(positive))
        log_parts.append(float(np.sum(np.log(a[positive]))))
        g = blk.geometric_means
        g_zero += int(np.count_nonzero(g == 0))
        g_parts.append(float(np.sum(g)))
        count += a.size
    return log_parts, a_zero, g_parts, g_zero, count


def scan_aggregate(
    B: NonnegMatrix, k: int, l: int, threads: int = 1, cap: int | None = DEFAULT_CAP
) -> ScanAggregate:
    """Reduce every k×l submatrix to the totals both sides of the inequality need.

    One partition walks the row subsets in revolving-door order. With
    ``threads > 1`` the row-rank space is cut into contiguous chunks and each
    chunk gets its own profile. Partial sums are merged with ``math.fsum``.
    """
    _check_kl(B, k, l, cap)
    if threads <= 1:
        parts = [_aggregate_blocks(iter_blocks(B, k, l, order="revolving"))]
    else:
        chunks = partition_ranks(math.comb(B.m, k), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _aggregate_blocks(iter_blocks(B, k, l, c[0], c[1])), chunks))
    return ScanAggregate(
        count=sum(p[4] for p in parts),
        log_a_sum=math.fsum(x for p in parts for x in p[0]),
        a_zero_count=sum(p[1] for p in parts),
        g_sum=math.fsum(x for p in parts for x in p[2]),
        g_zero_count=sum(p[3] for p in parts),
    )
