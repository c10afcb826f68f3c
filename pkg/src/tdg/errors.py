"""Exception types shared across the library."""


class GameError(Exception):
    """Base class for all library-specific errors."""


class DegenerateState(GameError):
    """Pursuer and evader coincide (separation below the degeneracy threshold)."""


class NonConvergence(GameError):
    """An iterative solver exhausted its budget without reaching tolerance.

    Carries the best iterate found so far in ``best``, when one exists, so
    callers opting into best-effort behaviour can still use it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class WrongSubspace(GameError):
    """A capture-game operation was invoked on an escape-space state (or vice versa)."""


class Infeasible(GameError):
    """The escape feasible set is empty for this state (capture-space state)."""


class DegeneratePoint(GameError):
    """The optimal escape point coincides with the evader; its bearing is indeterminate."""


class BracketingFailure(GameError):
    """A barrier-curve ray found no sign change inside the search radius."""

    def __init__(self, message: str, ray_index: int | None = None, angle: float | None = None):
        super().__init__(message)
        self.ray_index = ray_index
        self.angle = angle


class SolverFailure(GameError):
    """A strategy solver failed during a closed-loop run; carries partial trajectory context."""

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record


class SchemaError(GameError):
    """A scenario file violated the strict schema; names the offending field."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
