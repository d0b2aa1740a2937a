"""Typed structures for weight containers and architecture manifests."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .exceptions import (
    DuplicateKeyError,
    InvalidDTypeError,
    InvalidKeyError,
    LengthOverflowError,
    ManifestFormatError,
    MissingKeyError,
    ShapeMismatchError,
)

MAX_KEY_BYTES = 4096
MAX_PAYLOAD_BYTES = 1 << 40
MAX_NDIM = 255

WDC_HEADER_SIZE = 16
# u32 key_len + u8 dtype + u8 ndim + u64 payload_len
WDC_ENTRY_FIXED_SIZE = 4 + 1 + 1 + 8


class DTypeCode(IntEnum):
    F32 = 0
    F64 = 1
    U8 = 2
    I64 = 3

    @property
    def width(self) -> int:
        return _DTYPE_WIDTHS[self]

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype(_DTYPE_DESCR[self])

    @property
    def descr(self) -> str:
        return _DTYPE_DESCR[self]

    @classmethod
    def from_descr(cls, descr: str) -> "DTypeCode":
        for code, value in _DTYPE_DESCR.items():
            if value == descr:
                return code
        raise InvalidDTypeError(f"不支持的 dtype: {descr}")

    @classmethod
    def parse(cls, value: "str | int | DTypeCode") -> "DTypeCode":
        if isinstance(value, DTypeCode):
            return value
        if isinstance(value, int):
            try:
                return cls(value)
            except ValueError as exc:
                raise InvalidDTypeError(f"未知 dtype 代码 {value}") from exc
        try:
            return cls[str(value).upper()]
        except KeyError as exc:
            raise InvalidDTypeError(f"未知 dtype 名称 {value}") from exc


_DTYPE_WIDTHS = {DTypeCode.F32: 4, DTypeCode.F64: 8, DTypeCode.U8: 1, DTypeCode.I64: 8}
_DTYPE_DESCR = {DTypeCode.F32: "<f4", DTypeCode.F64: "<f8", DTypeCode.U8: "|u1", DTypeCode.I64: "<i8"}
_KIND_WIDTH_CODES = {
    ("f", 4): DTypeCode.F32,
    ("f", 8): DTypeCode.F64,
    ("u", 1): DTypeCode.U8,
    ("i", 8): DTypeCode.I64,
}


class ContainerFormat(str, Enum):
    WDC = "wdc"
    NPZ = "npz"

    @classmethod
    def guess(cls, path: str | Path) -> "ContainerFormat":
        return cls.NPZ if Path(path).suffix.lower() == ".npz" else cls.WDC


def validate_key(key: str) -> bytes:
    if not isinstance(key, str) or not key:
        raise InvalidKeyError("tensor key 不能为空")
    try:
        encoded = key.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise InvalidKeyError(f"tensor key 不是合法 UTF-8: {key!r}") from exc
    if len(encoded) > MAX_KEY_BYTES:
        raise InvalidKeyError(f"tensor key 超过 {MAX_KEY_BYTES} 字节")
    return encoded


def element_count(shape: Sequence[int]) -> int:
    return math.prod(shape)


@dataclass(frozen=True)
class TensorEntry:
    """One named tensor: little-endian payload bytes plus dtype and shape."""

    key: str
    dtype: DTypeCode
    shape: Tuple[int, ...]
    payload: bytes

    def __post_init__(self) -> None:
        validate_key(self.key)
        object.__setattr__(self, "dtype", DTypeCode.parse(self.dtype))
        shape = tuple(int(n) for n in self.shape)
        if len(shape) > MAX_NDIM:
            raise LengthOverflowError(f"维度数 {len(shape)} 超过 {MAX_NDIM}")
        if any(n < 0 for n in shape):
            raise ShapeMismatchError(f"shape 含负数: {shape}")
        if any(n >= 1 << 64 for n in shape):
            raise LengthOverflowError(f"shape 维度超过 u64: {shape}")
        object.__setattr__(self, "shape", shape)
        payload = bytes(self.payload)
        if len(payload) > MAX_PAYLOAD_BYTES:
            raise LengthOverflowError(f"payload {len(payload)} 字节超过上限")
        expected = element_count(shape) * self.dtype.width
        if expected != len(payload):
            raise ShapeMismatchError(
                f"{self.key}: shape {shape} × {self.dtype.width} = {expected} ≠ payload {len(payload)}"
            )
        object.__setattr__(self, "payload", payload)

    @classmethod
    def from_array(cls, key: str, array: np.ndarray) -> "TensorEntry":
        array = np.asarray(array)
        dtype = _KIND_WIDTH_CODES.get((array.dtype.kind, array.dtype.itemsize))
        if dtype is None:
            raise InvalidDTypeError(f"不支持的 numpy dtype: {array.dtype}")
        data = np.ascontiguousarray(array, dtype=dtype.numpy_dtype)
        return cls(key=key, dtype=dtype, shape=tuple(array.shape), payload=data.tobytes(order="C"))

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.payload, dtype=self.dtype.numpy_dtype).reshape(self.shape)

    @property
    def wdc_size(self) -> int:
        """Exact bytes this entry occupies in a WDC file."""
        return (
            WDC_ENTRY_FIXED_SIZE
            + len(self.key.encode("utf-8"))
            + 8 * len(self.shape)
            + len(self.payload)
        )


def wdc_entry_size(key: str, ndim: int, payload_len: int) -> int:
    return WDC_ENTRY_FIXED_SIZE + len(key.encode("utf-8")) + 8 * ndim + payload_len


@dataclass
class Checkpoint:
    """Ordered, key-unique collection of tensor entries.

    Equality is order-sensitive and ignores the format tag, so a value read
    back from either container compares equal to the one written.
    """

    entries: List[TensorEntry] = field(default_factory=list)
    format: ContainerFormat = field(default=ContainerFormat.WDC, compare=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if entry.key in seen:
                raise DuplicateKeyError(f"重复的 tensor key: {entry.key}")
            seen.add(entry.key)
        self.entries = list(self.entries)

    def __iter__(self) -> Iterator[TensorEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: object) -> bool:
        return any(entry.key == key for entry in self.entries)

    @property
    def keys(self) -> List[str]:
        return [entry.key for entry in self.entries]

    def add_entry(self, entry: TensorEntry) -> None:
        if entry.key in self:
            raise DuplicateKeyError(f"重复的 tensor key: {entry.key}")
        self.entries.append(entry)

    def get_entry(self, key: str) -> TensorEntry:
        for entry in self.entries:
            if entry.key == key:
                return entry
        raise MissingKeyError(f"tensor key 不存在: {key}")

    def remove_entry(self, key: str) -> TensorEntry:
        for index, entry in enumerate(self.entries):
            if entry.key == key:
                return self.entries.pop(index)
        raise MissingKeyError(f"tensor key 不存在: {key}")

    def total_size(self) -> int:
        """Exact serialized WDC size, computed without serializing."""
        return WDC_HEADER_SIZE + sum(entry.wdc_size for entry in self.entries)

    def copy(self) -> "Checkpoint":
        return Checkpoint(entries=list(self.entries), format=self.format)


@dataclass(frozen=True)
class ManifestEntry:
    key: str
    dtype: DTypeCode
    shape: Tuple[int, ...]


@dataclass
class ArchitectureManifest:
    """Defender's ground truth: the tensors a legitimate export contains."""

    entries: List[ManifestEntry]
    expected_total_bytes: int

    def __post_init__(self) -> None:
        keys = [entry.key for entry in self.entries]
        if len(keys) != len(set(keys)):
            raise DuplicateKeyError("架构清单中存在重复 key")

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "ArchitectureManifest":
        return cls(
            entries=[ManifestEntry(e.key, e.dtype, e.shape) for e in checkpoint],
            expected_total_bytes=checkpoint.total_size(),
        )

    def lookup(self) -> Dict[str, ManifestEntry]:
        return {entry.key: entry for entry in self.entries}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "expected_total_bytes": self.expected_total_bytes,
            "entries": [
                {"key": e.key, "dtype": e.dtype.name, "shape": list(e.shape)} for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ArchitectureManifest":
        try:
            entries = [
                ManifestEntry(
                    key=str(item["key"]),
                    dtype=DTypeCode.parse(item["dtype"]),
                    shape=tuple(int(n) for n in item["shape"]),
                )
                for item in payload["entries"]
            ]
            return cls(entries=entries, expected_total_bytes=int(payload["expected_total_bytes"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestFormatError(f"架构清单格式错误: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "ArchitectureManifest":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestFormatError(f"架构清单不是合法 JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ManifestFormatError("架构清单必须是 JSON 对象")
        return cls.from_dict(payload)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")
