import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from submatrix_amgm import (
    EXACT,
    FLOAT64,
    NonnegMatrix,
    SubmatrixSelection,
    brute_lemma,
    coefficient_check,
    evaluate_theorem,
    holder_mixed,
    lemma_identity,
    proof_trace,
)
from submatrix_amgm.errors import NonpositiveEntry, RangeViolation
from submatrix_amgm.lemma import intersection_means
from submatrix_amgm.inequality import valid_kl

from conftest import matrix


def all_bases(m, n, k, l):
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), l):
            yield SubmatrixSelection.of(m, n, rows, cols)


def test_constant_residual_zero():
    B = NonnegMatrix.constant(4, 3, 2.5)
    for base in all_bases(4, 3, 3, 2):
        for r in (0, 0.5, 1, 2):
            assert abs(lemma_identity(B, base, r).residual) <= 1e-15


def test_random_3x3_r1_direct(rng):
    x = rng.uniform(0.1, 1, (3, 3))
    B = NonnegMatrix.from_rows(x.tolist())
    base = SubmatrixSelection.of(3, 3, [0, 2], [1, 2])
    # direct partner sum, written out independently
    total = 0.0
    for rows in itertools.combinations(range(3), 2):
        for cols in itertools.combinations(range(3), 2):
            rr = [i for i in (0, 2) if i in rows]
            cc = [j for j in (1, 2) if j in cols]
            total += np.mean([x[i, j] for i in rr for j in cc])
    a_base = np.mean([x[i, j] for i in (0, 2) for j in (1, 2)])
    assert total / 9 == pytest.approx(a_base, rel=1e-13)
    res = lemma_identity(B, base, 1)
    assert abs(res.residual) <= 1e-12 * res.lhs
    assert res.rhs == pytest.approx(total / 9, rel=1e-13)


def test_random_3x3_r0_product_form(rng):
    x = rng.uniform(0.1, 1, (3, 3))
    B = NonnegMatrix.from_rows(x.tolist())
    base = SubmatrixSelection.of(3, 3, [1, 2], [0, 1])
    prod = 1.0
    for rows in itertools.combinations(range(3), 2):
        for cols in itertools.combinations(range(3), 2):
            vals = [x[i, j] for i in (1, 2) if i in rows for j in (0, 1) if j in cols]
            prod *= math.prod(vals) ** (1 / len(vals))
    g_base = math.prod(x[i, j] for i in (1, 2) for j in (0, 1)) ** 0.25
    assert prod ** (1 / 9) == pytest.approx(g_base, rel=1e-13)
    assert abs(lemma_identity(B, base, 0).residual) <= 1e-12


def test_r0_with_zero_entry():
    B = matrix([[0, 1, 2], [3, 4, 5], [6, 7, 8]])
    base = SubmatrixSelection.of(3, 3, [0, 1], [0, 1])
    assert lemma_identity(B, base, 0).residual == 0


def test_exact_residual_and_range(rng):
    B = NonnegMatrix.from_rows(rng.integers(0, 5, (3, 4)).tolist(), exact=True)
    for base in all_bases(3, 4, 2, 3):
        for r in (1, 2, 3):
            res = lemma_identity(B, base, r, EXACT)
            assert res.residual == 0 and isinstance(res.lhs, Fraction)
            assert res.residual == brute_lemma(B, base, r)
    with pytest.raises(RangeViolation):
        lemma_identity(B, SubmatrixSelection.of(3, 4, [0], [0, 1, 2]), 1)


def test_r2_random_positive(rng):
    for _ in range(20):
        m, n = rng.integers(1, 6, 2)
        B = NonnegMatrix.from_rows(rng.uniform(0.01, 1, (m, n)).tolist())
        for k, l in valid_kl(int(m), int(n)):
            base = next(all_bases(int(m), int(n), k, l))
            assert lemma_identity(B, base, 2).relative_residual <= 1e-12


def test_intersections_nonempty_in_range():
    for m in range(1, 6):
        for n in range(1, 6):
            for k, l in valid_kl(m, n):
                base = next(all_bases(m, n, k, l))
                for rec in intersection_means(NonnegMatrix.constant(m, n, 1.0), base, 1).records:
                    assert rec.row_overlap >= 2 * k - m and rec.col_overlap >= 2 * l - n


def test_coefficients_3x3():
    t = coefficient_check(3, 3, 2, 2, SubmatrixSelection.of(3, 3, [0, 1], [0, 1]))
    assert t.coefficients == {(0, 0): Fraction(1, 4), (0, 1): Fraction(1, 4), (1, 0): Fraction(1, 4), (1, 1): Fraction(1, 4)}
    assert t.ok and t.total == 1


def test_coefficients_3x2():
    t = coefficient_check(3, 2, 2, 2)
    assert t.ok and set(t.coefficients.values()) == {Fraction(1, 4)}


def test_coefficients_out_of_range_rejected():
    with pytest.raises(RangeViolation):
        coefficient_check(4, 4, 2, 3)


def test_holder_examples():
    h = holder_mixed([[3.0] * 5] * 4)
    assert h.left == pytest.approx(15, rel=1e-14) and h.right == pytest.approx(15, rel=1e-14)
    h = holder_mixed([[1, 4], [4, 1]])
    assert h.left == pytest.approx(4, rel=1e-15) and h.right == pytest.approx(5, rel=1e-15) and h.holds
    with pytest.raises(NonpositiveEntry):
        holder_mixed([[1, 0]])


def test_holder_random_against_high_precision(rng):
    import mpmath

    x = rng.uniform(0.1, 3, (4, 6))
    h = holder_mixed(x)
    with mpmath.workdps(40):
        xs = [[mpmath.mpf(float(v)) for v in row] for row in x]
        left = mpmath.fsum(mpmath.root(mpmath.fprod(xs[j][c] for j in range(4)), 4) for c in range(6))
        right = mpmath.root(mpmath.fprod(mpmath.fsum(row) for row in xs), 4)
    assert h.holds
    assert h.left == pytest.approx(float(left), rel=1e-12)
    assert h.right == pytest.approx(float(right), rel=1e-12)


def test_trace_constant_all_equal():
    tr = proof_trace(NonnegMatrix.constant(3, 3, 2.0), 2, 2)
    assert tr.ok
    for v in (tr.lhs, tr.middle * 1, tr.holder_side, tr.rhs):
        assert v == pytest.approx(2.0, rel=1e-14) or v == pytest.approx(tr.middle)
    assert tr.lhs == pytest.approx(tr.middle * 1, rel=1e-14)


def test_trace_random_3x3(rng):
    B = NonnegMatrix.from_rows(rng.uniform(0.05, 1, (3, 3)).tolist())
    tr = proof_trace(B, 2, 2)
    rep = evaluate_theorem(B, 2, 2)
    assert tr.ok
    assert tr.lhs >= tr.middle >= tr.holder_side
    assert tr.lhs == pytest.approx(rep.lhs, rel=1e-12)
    assert tr.rhs == pytest.approx(rep.rhs, rel=1e-12)


def test_trace_4x4_pairs(rng):
    B = NonnegMatrix.from_rows(rng.uniform(0.05, 1, (4, 4)).tolist())
    tr = proof_trace(B, 3, 3)
    assert tr.ok and tr.pair_count == 256 and len(tr.base_means) == 16


def test_trace_exact_first_link(rng):
    B = NonnegMatrix.from_rows(rng.integers(1, 5, (3, 3)).tolist())
    tr = proof_trace(B, 2, 2, EXACT)
    assert tr.links[0].name == "mean_decomposition" and tr.links[0].relative_gap == 0 and tr.ok


def test_trace_requires_positive():
    with pytest.raises(NonpositiveEntry):
        proof_trace(matrix([[0, 1], [1, 1]]), 2, 2)
    with pytest.raises(RangeViolation):
        proof_trace(NonnegMatrix.constant(4, 4, 1.0), 2, 3)


def test_pairwise_amgm_equality_only_on_constant_intersections(rng):
    x = rng.uniform(0.1, 1, (3, 3))
    x[0, 0] = x[0, 1] = x[1, 0] = x[1, 1]
    tr = proof_trace(NonnegMatrix.from_rows(x.tolist()), 2, 2)
    assert tr.links[2].name == "pairwise_amgm" and tr.links[2].holds
