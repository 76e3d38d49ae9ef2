"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured size cap."""


class ModelError(RuntimeError):
    """A probabilistic model cannot honor a request (e.g. conditioning on a null event)."""


class InvariantError(RuntimeError):
    """An internal structural invariant was violated; indicates a bug."""
