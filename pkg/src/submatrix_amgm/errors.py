"""Exception hierarchy.

Every error carries the exit code the CLI maps it to.
"""

from __future__ import annotations


class AmgmError(Exception):
    exit_code = 2


class InputError(AmgmError, ValueError):
    """Bad matrix text or bad arguments."""


class MalformedInput(InputError):
    pass


class NegativeEntry(InputError):
    pass


class RaggedRows(InputError):
    pass


class EmptyMatrix(InputError):
    pass


class EmptyInput(InputError):
    pass


class NonpositiveEntry(InputError):
    pass


class RangeViolation(InputError):
    """Raised when 2k > m or 2l > n does not hold."""


class RangeNotDegenerate(InputError):
    """Raised when a counterexample is requested inside the valid range."""


class RankOutOfRange(InputError, IndexError):
    pass


class SelectionOutOfRange(InputError, IndexError):
    pass


class CapExceeded(AmgmError):
    exit_code = 3


class PrecisionExhausted(AmgmError):
    exit_code = 3


class EmptyIntersection(AmgmError, AssertionError):
    """Two in-range submatrices failed to overlap. Indicates a bug."""

    exit_code = 1
