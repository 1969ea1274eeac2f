"""Binary feature-matrix I/O (SSF1) and the named-tensor container built on it.

SSF1 layout (all integers little-endian):

    bytes 0..3    magic  b"SSF1"
    bytes 4..7    version, u32 = 1
    bytes 8..11   rows, u32
    bytes 12..15  cols, u32
    bytes 16..    payload: rows*cols float32 values, row-major, little-endian

The named-tensor container (used for checkpoints) generalizes the same
header discipline to a sequence of named, arbitrary-rank float arrays
plus a JSON metadata block:

    magic b"SSN1", version u32=1,
    meta_len u32, meta (UTF-8 JSON),
    n_entries u32, then per entry:
        name_len u32, name (UTF-8),
        dtype u8 (0=float32, 1=float64, 2=int64),
        ndim u8, dims u32 * ndim,
        payload (little-endian, C order)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError, FormatError

SSF_MAGIC = b"SSF1"
SSN_MAGIC = b"SSN1"
VERSION = 1

_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("<i8")}
_DTYPE_CODES = {np.dtype("float32"): 0, np.dtype("float64"): 1, np.dtype("int64"): 2}


def write_features(path: str | Path, matrix: np.ndarray) -> None:
    """Write a 2-D float matrix to ``path`` in the SSF1 format.

    Values are stored as float32; pass float32 input for a bit-exact
    round trip. Non-finite values are rejected.
    """
    mat = np.asarray(matrix)
    if mat.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {mat.shape}")
    if mat.size and not np.all(np.isfinite(mat)):
        raise DataError("matrix contains non-finite values")
    mat = np.ascontiguousarray(mat, dtype="<f4")
    rows, cols = mat.shape
    with open(path, "wb") as f:
        f.write(SSF_MAGIC)
        f.write(struct.pack("<III", VERSION, rows, cols))
        f.write(mat.tobytes())


def read_features(path: str | Path) -> np.ndarray:
    """Read an SSF1 file back into a float32 matrix of shape [rows, cols]."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(data) < 16:
        raise FormatError(f"{path}: truncated header ({len(data)} bytes)")
    if data[:4] != SSF_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}, expected {SSF_MAGIC!r}")
    version, rows, cols = struct.unpack("<III", data[4:16])
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = 16 + 4 * rows * cols
    if len(data) != expected:
        raise FormatError(
            f"{path}: payload size mismatch (got {len(data)} bytes, expected {expected})"
        )
    payload = np.frombuffer(data, dtype="<f4", count=rows * cols, offset=16)
    return payload.reshape(rows, cols).copy()


def write_named_tensors(path: str | Path, tensors: dict[str, np.ndarray], meta: dict) -> None:
    """Write a named-tensor container with a JSON metadata block."""
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(SSN_MAGIC)
        f.write(struct.pack("<II", VERSION, len(meta_bytes)))
        f.write(meta_bytes)
        f.write(struct.pack("<I", len(tensors)))
        for name, arr in tensors.items():
            arr = np.asarray(arr)
            if arr.dtype not in _DTYPE_CODES:
                arr = arr.astype(np.float32)
            code = _DTYPE_CODES[arr.dtype]
            arr = np.ascontiguousarray(arr)
            name_bytes = name.encode("utf-8")
            f.write(struct.pack("<I", len(name_bytes)))
            f.write(name_bytes)
            f.write(struct.pack("<BB", code, arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(arr.astype(arr.dtype.newbyteorder("<")).tobytes())


def read_named_tensors(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    """Read a named-tensor container; returns (tensors, meta)."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(data) < 12 or data[:4] != SSN_MAGIC:
        raise FormatError(f"{path}: not a named-tensor container")
    version, meta_len = struct.unpack("<II", data[4:12])
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    off = 12
    try:
        meta = json.loads(data[off : off + meta_len].decode("utf-8"))
        off += meta_len
        (n_entries,) = struct.unpack_from("<I", data, off)
        off += 4
        tensors: dict[str, np.ndarray] = {}
        for _ in range(n_entries):
            (name_len,) = struct.unpack_from("<I", data, off)
            off += 4
            name = data[off : off + name_len].decode("utf-8")
            off += name_len
            code, ndim = struct.unpack_from("<BB", data, off)
            off += 2
            shape = struct.unpack_from(f"<{ndim}I", data, off)
            off += 4 * ndim
            dtype = _DTYPES[code]
            count = int(np.prod(shape)) if ndim else 1
            arr = np.frombuffer(data, dtype=dtype, count=count, offset=off)
            off += count * dtype.itemsize
            tensors[name] = arr.reshape(shape).copy()
    except (struct.error, KeyError, ValueError) as exc:
        raise FormatError(f"{path}: truncated or corrupt container: {exc}") from exc
    if off != len(data):
        raise FormatError(f"{path}: {len(data) - off} trailing bytes")
    return tensors, meta
