"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, InputError -> 2,
StructuralError (and subclasses) -> 3.
"""


class UsageError(ValueError):
    """Caller violated a precondition (size mismatch, bad flag, stale handle)."""


class InputError(ValueError):
    """Malformed input data or file (parse failures, non-finite values)."""


class StructuralError(RuntimeError):
    """An operation would corrupt a factorization or chain complex."""


class RankDeficiencyError(StructuralError):
    """A matrix required to be invertible turned out singular."""


class DegenerateGradientError(RuntimeError):
    """A persistence gradient hit a zero-distance contributing pair."""
