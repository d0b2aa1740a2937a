from ..exceptions import UsageError


class SimConfigError(UsageError):
    """Simulator configuration violates an invariant."""

    pass
