"""ZIP-of-NPY weight archives (the ``.npz`` layout), restricted to a strict NPY subset."""

from __future__ import annotations

import io
import zipfile
import zlib
from pathlib import Path

import numpy as np

from ..utils import setup_logger
from .exceptions import (
    DuplicateKeyError,
    InvalidKeyError,
    MalformedArchiveError,
    ShapeMismatchError,
    TruncatedError,
    UnsupportedLayoutError,
)
from .models import Checkpoint, ContainerFormat, DTypeCode, TensorEntry, element_count

logger = setup_logger(__name__)

NPY_SUFFIX = ".npy"
NPY_VERSION = (1, 0)
SUPPORTED_DESCR = {code.descr for code in DTypeCode}
# fixed member timestamps keep archives byte-deterministic
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)

_ARCHIVE_ERRORS = (
    zipfile.BadZipFile,
    zipfile.LargeZipFile,
    zlib.error,
    EOFError,
    OSError,
    ValueError,
    NotImplementedError,
    RuntimeError,
)
_HEADER_ERRORS = (
    ValueError,
    TypeError,
    SyntaxError,
    KeyError,
    OverflowError,
    RecursionError,
    MemoryError,
)


def _npy_bytes(entry: TensorEntry) -> bytes:
    member = io.BytesIO()
    np.lib.format.write_array(member, entry.to_array(), version=NPY_VERSION, allow_pickle=False)
    return member.getvalue()


def serialize_npz(checkpoint: Checkpoint, *, compressed: bool = True) -> bytes:
    """One NPY member per tensor, named ``key + ".npy"``, in checkpoint order.

    Keys containing NUL are valid tensor keys (WDC stores them) but cannot be
    zip member names, so they raise ``InvalidKeyError`` here.
    """
    buffer = io.BytesIO()
    method = zipfile.ZIP_DEFLATED if compressed else zipfile.ZIP_STORED
    with zipfile.ZipFile(buffer, "w") as archive:
        for entry in checkpoint:
            if "\x00" in entry.key:
                raise InvalidKeyError(f"NPZ 成员名不能包含 NUL: {entry.key!r}")
            info = zipfile.ZipInfo(entry.key + NPY_SUFFIX, date_time=_ZIP_EPOCH)
            info.compress_type = method
            info.external_attr = 0o644 << 16
            archive.writestr(info, _npy_bytes(entry))
    return buffer.getvalue()


def _parse_npy(key: str, raw: bytes) -> TensorEntry:
    stream = io.BytesIO(raw)
    try:
        version = np.lib.format.read_magic(stream)
    except _HEADER_ERRORS as exc:
        raise MalformedArchiveError(f"{key}: NPY magic 无效: {exc}") from exc
    if version != NPY_VERSION:
        raise UnsupportedLayoutError(f"{key}: 不支持的 NPY 版本 {version}")
    try:
        shape, fortran_order, dtype = np.lib.format.read_array_header_1_0(stream)
    except _HEADER_ERRORS as exc:
        raise MalformedArchiveError(f"{key}: NPY 头部无效: {exc}") from exc
    if fortran_order:
        raise UnsupportedLayoutError(f"{key}: 不支持 fortran_order=True")
    if dtype.str not in SUPPORTED_DESCR:
        raise UnsupportedLayoutError(f"{key}: 不支持的 descr {dtype.str}")

    code = DTypeCode.from_descr(dtype.str)
    shape = tuple(int(n) for n in shape)
    payload = stream.read()
    expected = element_count(shape) * code.width
    if len(payload) < expected:
        raise TruncatedError(f"{key}: NPY 数据被截断 (需要 {expected}，实际 {len(payload)})")
    if len(payload) > expected:
        raise ShapeMismatchError(f"{key}: NPY 数据长度 {len(payload)} 与 shape {shape} 不符")
    return TensorEntry(key=key, dtype=code, shape=shape, payload=payload)


def parse_npz(data: bytes) -> Checkpoint:
    """Inverse of serialize_npz; raises only CheckpointError subclasses."""
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except _ARCHIVE_ERRORS as exc:
        raise MalformedArchiveError(f"ZIP 中央目录无效: {exc}") from exc

    checkpoint = Checkpoint(format=ContainerFormat.NPZ)
    seen: set[str] = set()
    with archive:
        for info in archive.infolist():
            name = info.filename
            if not name.endswith(NPY_SUFFIX) or len(name) == len(NPY_SUFFIX):
                raise MalformedArchiveError(f"成员 {name!r} 不是 NPY 文件")
            key = name[: -len(NPY_SUFFIX)]
            if key in seen:
                raise DuplicateKeyError(f"重复的 tensor key: {key}")
            try:
                with archive.open(info) as member:
                    raw = member.read()
            except _ARCHIVE_ERRORS as exc:
                raise MalformedArchiveError(f"成员 {name!r} 读取失败: {exc}") from exc
            checkpoint.entries.append(_parse_npy(key, raw))
            seen.add(key)
    return checkpoint


def write_npz(checkpoint: Checkpoint, path: str | Path, *, compressed: bool = True) -> int:
    data = serialize_npz(checkpoint, compressed=compressed)
    Path(path).write_bytes(data)
    logger.debug("💾 NPZ 写入 %s: %s 个 entry, %s 字节", path, len(checkpoint), len(data))
    return len(data)


def read_npz(path: str | Path) -> Checkpoint:
    return parse_npz(Path(path).read_bytes())
