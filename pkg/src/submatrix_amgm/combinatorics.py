"""Binomials, lexicographic rank/unrank of k-subsets, and two enumerators.

``enumerate_lex`` walks k-subsets in lexicographic order. The revolving-door
enumerator visits the same subsets in an order where neighbours differ by a
single swap, which is what incremental statistics want.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .core import IndexSubset
from .errors import CapExceeded, InputError, RankOutOfRange

DEFAULT_CAP = 2 ** 40


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise InputError(f"binomial arguments must be nonnegative, got ({n}, {k})")
    return math.comb(n, k)


def check_cap(count: int, cap: int | None = DEFAULT_CAP) -> None:
    if cap is not None and count > cap:
        raise CapExceeded(f"{count} submatrices exceeds enumeration cap {cap}")


def _check_nk(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")


def rank(subset: IndexSubset | tuple[int, ...], n: int | None = None) -> int:
    """Lexicographic position of ``subset`` among all k-subsets of range(n)."""
    if isinstance(subset, IndexSubset):
        n, idx = subset.universe, subset.indices
    else:
        idx = tuple(subset)
        if n is None:
            raise InputError("universe size required for a bare tuple")
    k = len(idx)
    r = 0
    prev = -1
    for pos, c in enumerate(idx):
        # count subsets that agree on idx[:pos] but put something smaller at pos
        for skipped in range(prev + 1, c):
            r += math.comb(n - 1 - skipped, k - 1 - pos)
        prev = c
    return r


def unrank(n: int, k: int, r: int) -> IndexSubset:
    return IndexSubset(n, unrank_tuple(n, k, r))


def unrank_tuple(n: int, k: int, r: int) -> tuple[int, ...]:
    _check_nk(n, k)
    total = math.comb(n, k)
    if not 0 <= r < total:
        raise RankOutOfRange(f"rank {r} outside [0, {total})")
    out = []
    c = 0
    for pos in range(k):
        while True:
            block = math.comb(n - 1 - c, k - 1 - pos)
            if r < block:
                break
            r -= block
            c += 1
        out.append(c)
        c += 1
    return tuple(out)


def next_lex(idx: tuple[int, ...], n: int) -> tuple[int, ...] | None:
    """Lexicographic successor, or None after the last subset."""
    k = len(idx)
    i = k - 1
    while i >= 0 and idx[i] == n - k + i:
        i -= 1
    if i < 0:
        return None
    head = idx[i] + 1
    return idx[:i] + tuple(range(head, head + k - i))


def enumerate_lex(n: int, k: int, start: int = 0, stop: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield k-subsets of range(n) with ranks in [start, stop), lexicographically."""
    _check_nk(n, k)
    total = math.comb(n, k)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    cur = unrank_tuple(n, k, start)
    for _ in range(stop - start):
        yield cur
        nxt = next_lex(cur, n)
        if nxt is None:
            return
        cur = nxt


@dataclass(frozen=True)
class SwapStep:
    removed: int
    inserted: int

    def apply(self, idx: tuple[int, ...]) -> tuple[int, ...]:
        if self.removed not in idx or self.inserted in idx:
            raise ValueError(f"swap {self} does not apply to {idx}")
        return tuple(sorted([i for i in idx if i != self.removed] + [self.inserted]))


def _revolving(n: int, k: int, reverse: bool) -> Iterator[tuple[int, ...]]:
    # R(n, k) = R(n-1, k) ++ reversed(R(n-1, k-1)) with n-1 appended
    if k == 0:
        yield ()
        return
    if k == n:
        yield tuple(range(n))
        return
    last = n - 1
    if not reverse:
        yield from _revolving(n - 1, k, False)
        for s in _revolving(n - 1, k - 1, True):
            yield s + (last,)
    else:
        for s in _revolving(n - 1, k - 1, False):
            yield s + (last,)
        yield from _revolving(n - 1, k, True)


def enumerate_revolving_door(n: int, k: int) -> Iterator[tuple[tuple[int, ...], SwapStep | None]]:
    """Yield (subset, swap) pairs; ``swap`` turns the previous subset into this one.

    The first item carries ``None`` since there is nothing to swap from.
    """
    _check_nk(n, k)
    prev = None
    for cur in _revolving(n, k, False):
        if prev is None:
            yield cur, None
        else:
            (removed,) = set(prev) - set(cur)
            (inserted,) = set(cur) - set(prev)
            yield cur, SwapStep(removed, inserted)
        prev = cur


class SubsetCursor:
    """Lexicographic cursor over k-subsets that tracks its own rank.

    Advancing past the last subset wraps to the first.
    """

    def __init__(self, n: int, k: int, start_rank: int = 0):
        _check_nk(n, k)
        self.n = n
        self.k = k
        self.total = math.comb(n, k)
        self.rank = start_rank
        self._current = unrank_tuple(n, k, start_rank)

    @property
    def current(self) -> IndexSubset:
        return IndexSubset(self.n, self._current)

    def advance(self) -> IndexSubset:
        nxt = next_lex(self._current, self.n)
        if nxt is None:
            self._current = tuple(range(self.k))
            self.rank = 0
        else:
            self._current = nxt
            self.rank += 1
        return self.current


def partition_ranks(total: int, parts: int) -> list[tuple[int, int]]:
    """Split [0, total) into at most ``parts`` contiguous, nearly equal chunks."""
    parts = max(1, min(parts, total))
    base, extra = divmod(total, parts)
    out = []
    lo = 0
    for p in range(parts):
        hi = lo + base + (1 if p < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def submatrix_id(row_rank: int, col_rank: int, col_count: int) -> int:
    return row_rank * col_count + col_rank
