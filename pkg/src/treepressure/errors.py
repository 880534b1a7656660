"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: configuration problems exit 1,
violated mathematical hypotheses exit 2, resource caps exit 3.
"""


class TreePressureError(Exception):
    exit_code = 1


class InvalidDimensionError(TreePressureError, ValueError):
    pass


class InvalidParameterError(TreePressureError, ValueError):
    pass


class DomainError(TreePressureError, ValueError):
    """Negative interaction, nonpositive site energy, NaN or +inf potential."""


class HypothesisViolationError(TreePressureError):
    """Input violates an irreducibility or nondegeneracy hypothesis."""

    exit_code = 2


class DegenerateInteractionError(HypothesisViolationError):
    """Every row of the interaction matrix is zero, so log s is -inf."""


class EmptySystemError(HypothesisViolationError):
    """Z_n = 0: no admissible pattern survives to the requested depth."""

    def __init__(self, message, dead_depth=None):
        super().__init__(message)
        self.dead_depth = dead_depth


class BackendMismatchError(TreePressureError, TypeError):
    """Exact arithmetic requested for a spec that has no exact view."""


class ResourceCapError(TreePressureError):
    exit_code = 3
