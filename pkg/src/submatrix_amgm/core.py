"""Shared domain types: matrices, index subsets, selections, backends, reports.

Indices are 0-based throughout. A "submatrix" is always a pair of index
subsets (rows, columns); its entries are the cross product of the two.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    EmptyMatrix,
    InputError,
    MalformedInput,
    NegativeEntry,
    RaggedRows,
    RangeViolation,
    SelectionOutOfRange,
)

Scalar = Union[float, Fraction]

_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_RATIO = re.compile(r"[+-]?\d+/\d+")

SMALLEST_NORMAL = float(np.finfo(np.float64).tiny)
EQUALITY_TOLERANCE = 1e-12


class Mode(enum.Enum):
    FLOAT64 = "float"
    EXACT = "exact"


@dataclass(frozen=True)
class ScalarBackend:
    """Numeric mode plus the relative tolerance used by float comparisons."""

    mode: Mode = Mode.FLOAT64
    tolerance: float = 1e-9
    equality_tolerance: float = EQUALITY_TOLERANCE

    @property
    def exact(self) -> bool:
        return self.mode is Mode.EXACT

    @classmethod
    def from_name(cls, name: str, tolerance: float = 1e-9) -> "ScalarBackend":
        try:
            return cls(Mode(name), tolerance)
        except ValueError:
            raise InputError(f"unknown backend {name!r} (expected 'float' or 'exact')") from None


FLOAT64 = ScalarBackend(Mode.FLOAT64)
EXACT = ScalarBackend(Mode.EXACT)


def _coerce(value, exact: bool) -> Scalar:
    if isinstance(value, bool):
        raise MalformedInput(f"not a number: {value!r}")
    if exact:
        v = value if isinstance(value, Fraction) else Fraction(value)
    else:
        v = float(value)
        if not math.isfinite(v):
            raise MalformedInput(f"non-finite entry: {value!r}")
    if v < 0:
        raise NegativeEntry(f"negative entry: {value!r}")
    return v


@dataclass(frozen=True)
class NonnegMatrix:
    """An m×n grid of nonnegative scalars stored row-major.

    Entries are either all ``float`` or all ``Fraction``; ``exact`` tells
    which. Construction validates shape and sign.
    """

    m: int
    n: int
    entries: tuple

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise EmptyMatrix(f"matrix must be at least 1x1, got {self.m}x{self.n}")
        if len(self.entries) != self.m * self.n:
            raise RaggedRows(f"expected {self.m * self.n} entries, got {len(self.entries)}")
        exact = bool(self.entries) and isinstance(self.entries[0], Fraction)
        object.__setattr__(self, "entries", tuple(_coerce(v, exact) for v in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], exact: bool | None = None) -> "NonnegMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise EmptyMatrix("matrix has no entries")
        n = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != n:
                raise RaggedRows(f"row {i} has {len(r)} entries, expected {n}")
        flat = [v for r in rows for v in r]
        if exact is None:
            exact = any(isinstance(v, Fraction) for v in flat)
        flat = [_coerce(v, exact) for v in flat]
        return cls(len(rows), n, tuple(flat))

    @classmethod
    def constant(cls, m: int, n: int, value, exact: bool = False) -> "NonnegMatrix":
        v = _coerce(value, exact)
        return cls(m, n, (v,) * (m * n))

    @property
    def exact(self) -> bool:
        return isinstance(self.entries[0], Fraction)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise SelectionOutOfRange(f"index ({i}, {j}) outside {self.m}x{self.n}")
        return self.entries[i * self.n + j]

    def rows(self) -> list[tuple]:
        n = self.n
        return [self.entries[i * n:(i + 1) * n] for i in range(self.m)]

    def transpose(self) -> "NonnegMatrix":
        return NonnegMatrix.from_rows(list(zip(*self.rows())), exact=self.exact)

    def scaled(self, c) -> "NonnegMatrix":
        return NonnegMatrix(self.m, self.n, tuple(v * c for v in self.entries))

    def as_float(self) -> "NonnegMatrix":
        if not self.exact:
            return self
        return NonnegMatrix(self.m, self.n, tuple(float(v) for v in self.entries))

    def as_exact(self) -> "NonnegMatrix":
        # Fraction(float) is exact, so this never rounds.
        if self.exact:
            return self
        return NonnegMatrix(self.m, self.n, tuple(Fraction(v) for v in self.entries))

    def to_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.entries], dtype=np.float64).reshape(self.m, self.n)

    def min(self) -> Scalar:
        return min(self.entries)

    def max(self) -> Scalar:
        return max(self.entries)


@dataclass(frozen=True)
class IndexSubset:
    """Strictly increasing indices drawn from ``range(universe)``."""

    universe: int
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.universe < 1:
            raise SelectionOutOfRange(f"universe must be positive, got {self.universe}")
        if not 1 <= len(idx) <= self.universe:
            raise SelectionOutOfRange(f"cardinality {len(idx)} outside [1, {self.universe}]")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise SelectionOutOfRange(f"indices not strictly increasing: {idx}")
        if idx[0] < 0 or idx[-1] >= self.universe:
            raise SelectionOutOfRange(f"indices {idx} outside [0, {self.universe})")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def intersection(self, other: "IndexSubset") -> tuple[int, ...]:
        other_set = set(other.indices)
        return tuple(i for i in self.indices if i in other_set)


@dataclass(frozen=True)
class SubmatrixSelection:
    rows: IndexSubset
    cols: IndexSubset

    @classmethod
    def of(cls, m: int, n: int, rows: Iterable[int], cols: Iterable[int]) -> "SubmatrixSelection":
        return cls(IndexSubset(m, tuple(sorted(rows))), IndexSubset(n, tuple(sorted(cols))))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def check_against(self, B: NonnegMatrix) -> None:
        if self.rows.universe != B.m or self.cols.universe != B.n:
            raise SelectionOutOfRange(
                f"selection over {self.rows.universe}x{self.cols.universe} applied to {B.m}x{B.n} matrix"
            )

    def entries(self, B: NonnegMatrix) -> list:
        self.check_against(B)
        return [B[i, j] for i in self.rows for j in self.cols]

    def intersect(self, other: "SubmatrixSelection") -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Positional intersection: (common rows, common columns)."""
        return self.rows.intersection(other.rows), self.cols.intersection(other.cols)


@dataclass(frozen=True)
class RangeParams:
    m: int
    n: int
    k: int
    l: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise InputError(f"matrix dimensions must be positive, got {self.m}x{self.n}")
        if not 1 <= self.k <= self.m:
            raise InputError(f"k={self.k} outside [1, m={self.m}]")
        if not 1 <= self.l <= self.n:
            raise InputError(f"l={self.l} outside [1, n={self.n}]")

    @property
    def valid_range(self) -> bool:
        return 2 * self.k > self.m and 2 * self.l > self.n

    def require_valid(self) -> None:
        if 2 * self.k <= self.m:
            raise RangeViolation(f"need 2k > m, got k={self.k}, m={self.m}")
        if 2 * self.l <= self.n:
            raise RangeViolation(f"need 2l > n, got l={self.l}, n={self.n}")

    @property
    def submatrix_count(self) -> int:
        return math.comb(self.m, self.k) * math.comb(self.n, self.l)


def valid_range(m: int, n: int, k: int, l: int) -> bool:
    return RangeParams(m, n, k, l).valid_range


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    EQUALITY = "equality"


@dataclass(frozen=True)
class TheoremReport:
    """Both sides of the mixed-mean inequality for one (B, k, l)."""

    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    verdict: Verdict
    submatrix_count: int
    params: RangeParams
    mode: Mode = Mode.FLOAT64
    lhs_bounds: tuple[float, float] | None = None
    rhs_bounds: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATED

    def to_dict(self) -> dict:
        d = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
            "verdict": self.verdict.value,
            "submatrix_count": self.submatrix_count,
            "m": self.params.m,
            "n": self.params.n,
            "k": self.params.k,
            "l": self.params.l,
            "valid_range": self.params.valid_range,
            "backend": self.mode.value,
        }
        if self.lhs_bounds is not None:
            d["lhs_bounds"] = list(self.lhs_bounds)
            d["rhs_bounds"] = list(self.rhs_bounds)
        d.update(self.extra)
        return d


def relative_margin(lhs: float, rhs: float) -> float:
    return (lhs - rhs) / max(lhs, SMALLEST_NORMAL)


def is_constant(B: NonnegMatrix, backend: ScalarBackend = FLOAT64) -> bool:
    lo, hi = B.min(), B.max()
    if backend.exact or B.exact:
        return lo == hi
    return hi - lo <= backend.tolerance * hi


# -- text formats -------------------------------------------------------------


def _parse_literal(token, exact: bool) -> Scalar:
    if isinstance(token, (int, float)) and not isinstance(token, bool):
        # JSON numbers already decoded; only reached when parse hooks were bypassed
        return _coerce(token, exact)
    if not isinstance(token, str):
        raise MalformedInput(f"not a number: {token!r}")
    s = token.strip()
    if _DECIMAL.fullmatch(s):
        value = Fraction(s) if exact else float(s)
    elif exact and _RATIO.fullmatch(s):
        value = Fraction(s)
    else:
        raise MalformedInput(f"not a nonnegative decimal literal: {token!r}")
    if value < 0:
        raise NegativeEntry(f"negative entry: {s}")
    return value if exact else value + 0.0  # folds -0.0 to 0.0


def parse_matrix(text: str, format: str = "csv", exact: bool = False) -> NonnegMatrix:
    """Parse CSV (one row per line) or JSON ``{"rows": [[...], ...]}``.

    With ``exact=True`` every literal becomes a ``Fraction`` with no rounding;
    ``p/q`` literals are then also accepted.
    """
    fmt = format.lower()
    if fmt == "csv":
        rows = []
        for record in csv.reader(io.StringIO(text)):
            if not record or all(not c.strip() for c in record):
                continue
            rows.append([_parse_literal(c, exact) for c in record])
    elif fmt == "json":
        try:
            doc = json.loads(text, parse_float=str, parse_int=str)
        except json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from None
        if not isinstance(doc, dict) or "rows" not in doc or not isinstance(doc["rows"], list):
            raise MalformedInput('JSON matrix must be an object {"rows": [[...], ...]}')
        rows = []
        for r in doc["rows"]:
            if not isinstance(r, list):
                raise MalformedInput(f"row is not a list: {r!r}")
            rows.append([_parse_literal(c, exact) for c in r])
        if all(not r for r in rows):
            rows = []
    else:
        raise InputError(f"unknown matrix format {format!r}")
    if not rows:
        raise EmptyMatrix("matrix has no entries")
    return NonnegMatrix.from_rows(rows, exact=exact)


def format_scalar(v: Scalar) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def serialize_matrix(B: NonnegMatrix, format: str = "csv") -> str:
    fmt = format.lower()
    if fmt == "csv":
        return "".join(",".join(format_scalar(v) for v in row) + "\n" for row in B.rows())
    if fmt == "json":
        if B.exact:
            rows = [[format_scalar(v) for v in row] for row in B.rows()]
        else:
            rows = [list(row) for row in B.rows()]
        return json.dumps({"rows": rows})
    raise InputError(f"unknown matrix format {format!r}")
