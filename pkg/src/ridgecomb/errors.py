"""Exception types shared across the package."""


class UsageError(ValueError):
    """An operation was called outside its contract (bad arguments or state)."""


class BuilderError(RuntimeError):
    """A builder failed at run time, e.g. a stratum starved its retry budget."""
