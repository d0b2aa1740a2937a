"""Root exception types shared by every package."""


class StashError(Exception):
    """Base class for all toolkit errors."""

    pass


class DataError(StashError):
    """Input data is malformed or violates a format invariant."""

    pass


class UsageError(StashError):
    """Arguments or configuration are invalid."""

    pass
