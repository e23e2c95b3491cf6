class SimError(Exception):
    pass


class ValidationError(SimError):
    """Raised when a parameter is out of its domain. `field` names the parameter."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message)


class DegenerateProblemError(ValidationError):
    """All gains are zero but the budget is positive: every allocation is optimal."""


class EnumerationCapError(ValidationError):
    pass


class InvariantError(SimError):
    """Raised when two independent evaluations of the same property disagree."""


class OutputError(SimError):
    pass


class CheckFailed(SimError):
    pass
