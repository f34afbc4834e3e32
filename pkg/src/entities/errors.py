"""
Error hierarchy for schurext.
"""

from typing import List, Optional, Sequence, Tuple


class SchurExtError(Exception):
    """Base class for every error raised by the package."""


class NonConvergence(SchurExtError):
    def __init__(self, sweeps: int, off_norm: float):
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(f"Jacobi iteration did not converge after {sweeps} sweeps "
                         f"(off-diagonal mass {off_norm:.3e})")


class NotPSD(SchurExtError):
    def __init__(self, min_eig: float):
        self.min_eig = min_eig
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.6e})")


class AsymmetricInput(SchurExtError):
    def __init__(self, correction: float):
        self.correction = correction
        super().__init__(f"input is not Hermitian (||M - M*||_F = {correction:.3e})")


class DomainError(SchurExtError):
    """Raised when a pair set is not a positivity domain."""

    def __init__(self, missing_diagonal: Sequence[int] = (),
                 asymmetric_pairs: Sequence[Tuple[int, int]] = (),
                 out_of_range: Sequence[Tuple[int, int]] = ()):
        self.missing_diagonal = list(missing_diagonal)
        self.asymmetric_pairs = list(asymmetric_pairs)
        self.out_of_range = list(out_of_range)
        parts = []
        if self.out_of_range:
            parts.append(f"indices out of range: {self.out_of_range}")
        if self.missing_diagonal:
            parts.append(f"missing diagonal points: {self.missing_diagonal}")
        if self.asymmetric_pairs:
            parts.append("asymmetric pairs (mirror missing): "
                         f"{self.asymmetric_pairs}")
        super().__init__("; ".join(parts) or "invalid positivity domain")


class NotChordalError(SchurExtError):
    def __init__(self, cycle: Optional[List[int]] = None):
        self.cycle = list(cycle or [])
        super().__init__(f"pattern is not chordal (chordless cycle {self.cycle})")


class UnspecifiedEntry(SchurExtError):
    def __init__(self, pair: Tuple[int, int]):
        self.pair = pair
        super().__init__(f"entry {pair} is not specified by the pattern")


class DimensionMismatch(SchurExtError):
    def __init__(self, what: str, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"{what}: expected {expected}, got {got}")


class NotAdmissible(SchurExtError):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(f"multiplier is not admissible: {verdict}")


class CompletionFailure(SchurExtError):
    def __init__(self, min_eig: float):
        self.min_eig = min_eig
        super().__init__(f"completed multiplier failed the final PSD check "
                         f"(min eigenvalue {min_eig:.6e})")


class InputError(SchurExtError):
    """Malformed JSON input; `field` is a dotted path into the document."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigError(SchurExtError):
    pass
