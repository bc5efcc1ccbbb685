"""Exception hierarchy shared by every module of the package."""


class DeductionError(Exception):
    """Base class for all errors raised by this package."""


class InconsistentInformationSet(DeductionError):
    """An information set became (or was) empty.

    A truthful oracle can never eliminate the real secret, so this always
    points at a bug or at an observation that did not come from a candidate.
    """


class InvalidDistribution(DeductionError):
    """A probability table has negative mass or does not sum to one."""


class InvalidAction(DeductionError):
    """An action is malformed or not legal for the game."""


class InvalidScale(DeductionError):
    """Game scale parameters failed validation."""


class InvalidBatch(DeductionError):
    """Episode records that must share a game and agent do not."""


class EnumerationCapExceeded(DeductionError):
    """Exact enumeration would exceed the configured work cap."""

    def __init__(self, work: int, cap: int):
        super().__init__(
            f"exact enumeration needs {work} (actions x candidates) evaluations, "
            f"above the cap of {cap}"
        )
        self.work = work
        self.cap = cap


class ConfigError(DeductionError):
    """A benchmark configuration file failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
