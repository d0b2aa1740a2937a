from ..exceptions import DataError, UsageError


class BudgetOverflowError(DataError):
    """An export size does not fit in an unsigned 64-bit byte count."""

    pass


class StrategyFormatError(UsageError):
    pass
