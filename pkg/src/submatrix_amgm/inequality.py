"""Both sides of the submatrix mixed-mean inequality.

lhs is the geometric mean, over every k×l submatrix, of the submatrix
arithmetic means; rhs is the arithmetic mean of the submatrix geometric
means. For 2k > m and 2l > n the inequality lhs >= rhs holds, with equality
for constant matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import DEFAULT_CAP, check_cap, enumerate_lex
from .core import (
    FLOAT64,
    Mode,
    NonnegMatrix,
    RangeParams,
    ScalarBackend,
    TheoremReport,
    Verdict,
    is_constant,
    relative_margin,
)
from .errors import InputError, PrecisionExhausted, RangeNotDegenerate
from .means import scan_aggregate, scan_all_submatrices
from .oracle import MAX_PREC, START_PREC, Enclosure, _ctx, _iv_rational


def _float_verdict(B: NonnegMatrix, rel: float, backend: ScalarBackend) -> Verdict:
    if rel < -backend.tolerance:
        return Verdict.VIOLATED
    if abs(rel) <= backend.equality_tolerance and is_constant(B, backend):
        return Verdict.EQUALITY
    return Verdict.HOLDS


def _evaluate_float(B, params, backend, threads, cap) -> TheoremReport:
    agg = scan_aggregate(B, params.k, params.l, threads=threads, cap=cap)
    N = agg.count
    lhs = 0.0 if agg.a_zero_count else math.exp(agg.log_a_sum / N)
    rhs = agg.g_sum / N
    rel = relative_margin(lhs, rhs)
    return TheoremReport(
        lhs=lhs,
        rhs=rhs,
        margin=lhs - rhs,
        relative_margin=rel,
        verdict=_float_verdict(B, rel, backend),
        submatrix_count=N,
        params=params,
        mode=Mode.FLOAT64,
    )


def _evaluate_exact(B, params, backend, cap, max_prec=MAX_PREC) -> TheoremReport:
    """Exact arithmetic means; roots and logs carried as refined intervals."""
    B = B.as_exact()
    k, l = params.k, params.l
    size = k * l
    stats = [s for _, s in scan_all_submatrices(B, k, l, cap=cap)]
    N = len(stats)
    means = [s.sum / size for s in stats]
    has_zero = [s.zero_count > 0 for s in stats]
    lhs_zero = any(a == 0 for a in means)
    rhs_zero = all(has_zero)
    constant = is_constant(B, backend)
    rows = B.rows()
    col_subsets = list(enumerate_lex(B.n, l))

    prec = START_PREC
    while True:
        ctx = _ctx(prec)
        logs = [[ctx.log(_iv_rational(ctx, v)) if v > 0 else None for v in r] for r in rows]
        g_total = ctx.mpf(0)
        sid = 0
        for row_set in enumerate_lex(B.m, k):
            col_logs = [
                None if any(logs[i][j] is None for i in row_set) else ctx.fsum(logs[i][j] for i in row_set)
                for j in range(B.n)
            ]
            for cols in col_subsets:
                if not has_zero[sid]:
                    g_total += ctx.exp(ctx.fsum(col_logs[j] for j in cols) / size)
                sid += 1
        rhs_iv = g_total / N
        if lhs_zero:
            lhs_iv = ctx.mpf(0)
        else:
            lhs_iv = ctx.exp(ctx.fsum(ctx.log(_iv_rational(ctx, a)) for a in means) / N)
        L, R = Enclosure.of(lhs_iv), Enclosure.of(rhs_iv)
        if constant:
            verdict = Verdict.EQUALITY
        elif lhs_zero and rhs_zero:
            verdict = Verdict.HOLDS
        elif L.lower > R.upper:
            verdict = Verdict.HOLDS
        elif L.upper < R.lower:
            verdict = Verdict.VIOLATED
        else:
            verdict = None
        if verdict is not None:
            break
        if prec >= max_prec:
            raise PrecisionExhausted(f"cannot separate lhs {L} from rhs {R} at {prec} bits")
        prec *= 2

    lhs = float(means[0]) if constant else (0.0 if lhs_zero else L.mid)
    rhs = float(means[0]) if constant else (0.0 if rhs_zero else R.mid)
    rel = 0.0 if constant else relative_margin(lhs, rhs)
    return TheoremReport(
        lhs=lhs,
        rhs=rhs,
        margin=lhs - rhs,
        relative_margin=rel,
        verdict=verdict,
        submatrix_count=N,
        params=params,
        mode=Mode.EXACT,
        lhs_bounds=L.as_floats(),
        rhs_bounds=R.as_floats(),
        extra={"precision_bits": prec},
    )


def evaluate_unchecked(
    B: NonnegMatrix,
    k: int,
    l: int,
    backend: ScalarBackend = FLOAT64,
    threads: int = 1,
    cap: int | None = DEFAULT_CAP,
) -> TheoremReport:
    """Evaluate both sides without enforcing 2k > m, 2l > n."""
    params = RangeParams(B.m, B.n, k, l)
    check_cap(params.submatrix_count, cap)
    if backend.exact:
        return _evaluate_exact(B, params, backend, cap)
    return _evaluate_float(B, params, backend, threads, cap)


def evaluate_theorem(
    B: NonnegMatrix,
    k: int,
    l: int,
    backend: ScalarBackend = FLOAT64,
    threads: int = 1,
    cap: int | None = DEFAULT_CAP,
) -> TheoremReport:
    """Evaluate the inequality inside its valid range.

    Raises ``RangeViolation`` unless 2k > m and 2l > n.
    """
    RangeParams(B.m, B.n, k, l).require_valid()
    return evaluate_unchecked(B, k, l, backend, threads, cap)


def counterexample_matrix(m: int, n: int, k: int, l: int, exact: bool = False) -> NonnegMatrix:
    """Counterexample outside the valid range.

    With 2k <= m the first k rows are ones and the rest zeros; otherwise,
    with 2l <= n, the first l columns are ones and the rest zeros.
    """
    RangeParams(m, n, k, l)
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    if 2 * k <= m:
        rows = [[one if i < k else zero for _ in range(n)] for i in range(m)]
    elif 2 * l <= n:
        rows = [[one if j < l else zero for j in range(n)] for _ in range(m)]
    else:
        raise RangeNotDegenerate(f"(m, n, k, l) = ({m}, {n}, {k}, {l}) is inside the valid range")
    return NonnegMatrix.from_rows(rows, exact=exact)


# -- randomized sweeps ----------------------------------------------------------

DISTRIBUTIONS = ("uniform", "uniform0", "loguniform", "constant")


def random_matrix(
    rng: np.random.Generator, m: int, n: int, distribution: str = "uniform", zero_fraction: float = 0.0
) -> NonnegMatrix:
    """Draw an m×n matrix.

    uniform: (0, 1]; uniform0: [0, 1] with ``zero_fraction`` of entries zeroed;
    loguniform: 10**U(-3, 3); constant: one value from (0, 1] everywhere.
    """
    if distribution == "uniform":
        x = 1.0 - rng.random((m, n))
    elif distribution == "uniform0":
        x = rng.random((m, n))
        x[rng.random((m, n)) < zero_fraction] = 0.0
    elif distribution == "loguniform":
        x = 10.0 ** rng.uniform(-3.0, 3.0, (m, n))
    elif distribution == "constant":
        x = np.full((m, n), 1.0 - rng.random())
    else:
        raise InputError(f"unknown distribution {distribution!r}; choose from {DISTRIBUTIONS}")
    if distribution != "uniform0" and zero_fraction > 0:
        x[rng.random((m, n)) < zero_fraction] = 0.0
    return NonnegMatrix.from_rows(x.tolist())


def valid_kl(m: int, n: int) -> list[tuple[int, int]]:
    return [(k, l) for k in range(m // 2 + 1, m + 1) for l in range(n // 2 + 1, n + 1)]


def invalid_kl(m: int, n: int) -> list[tuple[int, int]]:
    return [
        (k, l)
        for k in range(1, m + 1)
        for l in range(1, n + 1)
        if not (2 * k > m and 2 * l > n)
    ]


@dataclass(frozen=True)
class ScanSummary:
    trials: int
    min_relative_margin: float
    equality_count: int
    violated_count: int
    out_of_range_trials: int
    out_of_range_violations: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def random_scan(
    trials: int,
    dims: tuple[int, int] = (1, 5),
    distribution: str = "uniform",
    seed: int = 0,
    out_of_range: bool = True,
    zero_fraction: float = 0.1,
    backend: ScalarBackend = FLOAT64,
) -> ScanSummary:
    """Evaluate random valid-range instances, and optionally out-of-range ones.

    Trial ``t`` draws from its own child of ``SeedSequence(seed)``, so any
    trial can be replayed on its own.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    lo, hi = dims
    children = np.random.SeedSequence(seed).spawn(trials)
    min_rel = math.inf
    equal = violated = oor_trials = oor_viol = 0
    for child in children:
        rng = np.random.default_rng(child)
        m, n = (int(v) for v in rng.integers(lo, hi + 1, size=2))
        pairs = valid_kl(m, n)
        k, l = pairs[rng.integers(len(pairs))]
        rep = evaluate_theorem(random_matrix(rng, m, n, distribution), k, l, backend)
        min_rel = min(min_rel, rep.relative_margin)
        equal += rep.verdict is Verdict.EQUALITY
        violated += rep.verdict is Verdict.VIOLATED
        if out_of_range:
            bad = invalid_kl(m, n)
            if bad:
                k, l = bad[rng.integers(len(bad))]
                B = random_matrix(rng, m, n, "uniform0", zero_fraction)
                oor_trials += 1
                oor_viol += evaluate_unchecked(B, k, l, backend).verdict is Verdict.VIOLATED
    return ScanSummary(trials, min_rel, equal, violated, oor_trials, oor_viol)
