"""Exception hierarchy shared across the pipeline."""


class CrewPairError(Exception):
    """Base class for all package errors."""


class InputDefect(CrewPairError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class ConfigError(InputDefect):
    pass


class ParseError(InputDefect):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class LegalityError(CrewPairError):
    """A duty or pairing violates a legality constraint.

    ``constraint`` names the first failed check, e.g. ``"C_duty:elapsed"``.
    """

    def __init__(self, constraint, detail=""):
        super().__init__(f"{constraint}: {detail}" if detail else constraint)
        self.constraint = constraint


class InfeasibleError(CrewPairError):
    """Some flight cannot be covered (CLI exit code 3)."""

    def __init__(self, message, flights=()):
        super().__init__(message)
        self.flights = tuple(flights)


class UncoveredFlight(InfeasibleError):
    pass


class IterationLimit(CrewPairError):
    """Simplex cycling guard tripped."""


class DimensionMismatch(CrewPairError):
    pass


class CapacityError(CrewPairError):
    """Enumeration exceeded the configured pairing cap."""


class NoProgress(CrewPairError):
    """IPDCH failed to cover any new flight twice in a row."""


class SpecInfeasible(InputDefect):
    """Synthetic network spec cannot be realised."""
