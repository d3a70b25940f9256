from typing import Optional


class LyapspecError(Exception):
    """Base class for every error raised by the library; carries a CLI exit code."""

    exit_code = 3


class UsageError(LyapspecError):
    exit_code = 1


class MapFileError(LyapspecError):
    exit_code = 2


# --- Domain errors (exit 3) ---

class DomainError(LyapspecError):
    exit_code = 3


class EmptyInput(DomainError):
    pass


class NonExpandingSlope(DomainError):
    pass


class NonFinite(DomainError):
    pass


class GeometryViolation(DomainError):
    pass


class DegenerateSpectrum(DomainError):
    pass


class AlphaOutOfDomain(DomainError):
    pass


class SingleBranch(DomainError):
    pass


class EmptySum(DomainError):
    pass


class NotApplicable(DomainError):
    pass


class NoSignChange(DomainError):
    pass


class BasePatternViolation(DomainError):
    pass


# --- Numerical errors (exit 4) ---

class NumericalError(LyapspecError):
    exit_code = 4


class ConvergenceError(NumericalError):
    pass


class TangentialAmbiguity(NumericalError):
    def __init__(self, critical_point: float, value: float, message: str = ""):
        super().__init__(
            message or f"Tangential zero candidate at t={critical_point!r} (value {value!r})"
        )
        self.critical_point = critical_point
        self.value = value


class CapExceeded(NumericalError):
    def __init__(self, last_candidate: float, cap: float, step: Optional[int] = None):
        where = f" at chain step {step}" if step is not None else ""
        super().__init__(
            f"Branch search exceeded log-slope cap {cap!r}{where} (last candidate {last_candidate!r})"
        )
        self.last_candidate = last_candidate
        self.cap = cap
        self.step = step
