from ..exceptions import DataError


class EmptyInputError(DataError):
    """Entropy of zero bytes is undefined."""

    pass
