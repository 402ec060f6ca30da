# Version: v1.0
"""
nilmoore.errors — Exception hierarchy.

Every error belongs to exactly one of three families; the CLI maps the
family onto its exit code (1 invalid mathematics, 2 unparsable input,
3 outside the supported scope).
"""

from typing import Optional


class MooreError(Exception):
    """Base class for every error raised by nilmoore."""

    exit_code = 1


# ---------------------------------------------------------------------------
# Exit code 1: the input is mathematically invalid
# ---------------------------------------------------------------------------


class MathematicalInvalidity(MooreError):
    exit_code = 1


class ShapeMismatch(MathematicalInvalidity):
    pass


class NotFullRank(MathematicalInvalidity):
    pass


class RankMismatch(MathematicalInvalidity):
    pass


class NotASublattice(MathematicalInvalidity):
    pass


class InvalidBracket(MathematicalInvalidity):
    pass


class JacobiViolation(MathematicalInvalidity):
    """Raised with the offending basis triple (0-based indices)."""

    def __init__(self, triple: tuple[int, int, int], message: str) -> None:
        super().__init__(message)
        self.triple = triple


class NotNilpotent(MathematicalInvalidity):
    """Raised with a basis of the stabilized, nonzero lower-central term."""

    def __init__(self, term: list, message: str) -> None:
        super().__init__(message)
        self.term = term


class NotClosed(MathematicalInvalidity):
    """exp(L) is not closed: *word* is a product whose log escapes L."""

    def __init__(self, word: tuple, log, message: str) -> None:
        super().__init__(message)
        self.word = word
        self.log = log


class NotInDualLattice(MathematicalInvalidity):
    pass


class EmptySpectrum(MathematicalInvalidity):
    pass


class FullStabilizer(MathematicalInvalidity):
    pass


# ---------------------------------------------------------------------------
# Exit code 2: the problem file cannot be parsed
# ---------------------------------------------------------------------------


class ProblemParseError(MooreError):
    exit_code = 2

    def __init__(self, message: str, location: Optional[str] = None) -> None:
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# ---------------------------------------------------------------------------
# Exit code 3: valid input outside what this library computes
# ---------------------------------------------------------------------------


class UnsupportedComputation(MooreError):
    exit_code = 3


class StepTooLarge(UnsupportedComputation):
    pass


class ChainNotFound(UnsupportedComputation):
    pass


class UnsupportedStep(UnsupportedComputation):
    pass


# ---------------------------------------------------------------------------
# Warnings
# ---------------------------------------------------------------------------


class WindowNotInvariantWarning(UserWarning):
    """A generator image left the enumeration window and no wraparound was given."""
