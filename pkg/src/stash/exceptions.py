"""Errors raised while hiding or recovering payloads."""

from ..exceptions import DataError, UsageError


class StashDataError(DataError):
    """Base class for payload-embedding data errors."""

    pass


class KeyCollisionError(StashDataError):
    """A generated stash key already exists in the carrier."""

    pass


class EmptyPayloadError(UsageError):
    pass


class NoManifestError(StashDataError):
    """No manifest under the mode's key (also what a wrong secret looks like)."""

    pass


class ManifestCorruptError(StashDataError):
    pass


class MissingChunkError(StashDataError):
    def __init__(self, index: int, key: str) -> None:
        super().__init__(f"缺少 chunk {index} ({key})")
        self.index = index
        self.key = key


class CrcMismatchError(StashDataError):
    def __init__(self, index: int, expected: int, actual: int) -> None:
        super().__init__(f"chunk {index} CRC 校验失败: 期望 {expected:08x}，实际 {actual:08x}")
        self.index = index
        self.expected = expected
        self.actual = actual
