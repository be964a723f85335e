"""Exception hierarchy shared by all modules."""


class NlsStepError(Exception):
    """Base class for library errors."""


class DomainError(NlsStepError, ValueError):
    """Argument outside the mathematical domain of a function."""


class AccuracyError(NlsStepError):
    """A numerical routine failed to reach its tolerance.

    ``estimate`` carries the best value obtained.
    """

    def __init__(self, msg, estimate=None, error=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


class DegenerateStep(NlsStepError, ValueError):
    """Two Riemann invariants coincide, so the case is ambiguous."""


class RegionError(NlsStepError, ValueError):
    """A region formula was evaluated outside its region."""


class ConfigError(NlsStepError, ValueError):
    """Invalid simulation or CLI configuration."""


class ConsistencyError(NlsStepError):
    """An internal cross-check failed (branch or representation mismatch)."""


class ZeroReflection(NlsStepError, ValueError):
    """The reflection coefficient vanishes identically."""
