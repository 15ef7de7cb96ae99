import itertools
import math

import numpy as np
import pytest

from submatrix_amgm import NonnegMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def matrix(rows, exact=False):
    return NonnegMatrix.from_rows(rows, exact=exact)


def naive_sides(x, k, l):
    """Plain-loop lhs/rhs straight from the definitions, for cross-checks."""
    x = np.asarray(x, dtype=float)
    m, n = x.shape
    log_a, g = [], []
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), l):
            vals = [x[i, j] for i in rows for j in cols]
            a = math.fsum(vals) / len(vals)
            log_a.append(math.log(a) if a > 0 else -math.inf)
            g.append(0.0 if min(vals) == 0 else math.exp(math.fsum(map(math.log, vals)) / len(vals)))
    N = len(g)
    lhs = 0.0 if -math.inf in log_a else math.exp(math.fsum(log_a) / N)
    return lhs, math.fsum(g) / N


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
