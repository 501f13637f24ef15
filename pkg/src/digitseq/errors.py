"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so each class carries its own.
"""


class DigitSeqError(Exception):
    exit_code = 4


class UsageError(DigitSeqError, ValueError):
    """Bad parameters, malformed input files, violated preconditions."""

    exit_code = 2


class RangeError(UsageError, IndexError):
    """Index, length or word outside the admissible range."""


class BudgetExceeded(UsageError):
    """An enumeration or allocation would exceed its configured cap.

    A kind of usage error (the request is too large), with its own exit code.
    """

    exit_code = 3


class InvariantViolation(DigitSeqError, AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""

    exit_code = 4
