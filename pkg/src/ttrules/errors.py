"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class InvalidStateError(RuntimeError):
    """An operation was called on an object in the wrong state."""


class InvalidConfigError(ValueError):
    """A configuration value is outside its documented range."""


class DegenerateStateError(RuntimeError):
    """A quantity is undefined because the solution is fully saturated."""


class TrainingFailureError(RuntimeError):
    """Training diverged (non-finite loss)."""


class SchemaMismatchError(ValueError):
    """An artifact and a dataset were built against different schemas."""


class UndefinedMetricError(ValueError):
    """The requested metric is undefined for the given labels."""
