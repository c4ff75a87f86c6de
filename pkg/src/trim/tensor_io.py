"""Self-describing binary tensor files and the shared in-memory matrix type.

File layout, all integers little-endian:

    bytes 0-7    magic ``TRIMTNSR``
    bytes 8-11   format version, u32 (currently 1)
    byte  12     dtype code, u8 (0 = float32)
    byte  13     number of dimensions, u8 (1 or 2)
    bytes 14-15  reserved, must be zero
    next         ndim x u64 extents
    rest         row-major float32 payload, exactly 4 * prod(extents) bytes

One-dimensional tensors load as a single-row matrix, so pooled text
embeddings and score vectors share the same in-memory type as token
matrices. Files carrying NaN or Inf are rejected at load time.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"TRIMTNSR"
VERSION = 1
DTYPE_FLOAT32 = 0

_HEADER = struct.Struct("<8sIBBH")  # magic, version, dtype, ndim, reserved


class TensorFormatError(Exception):
    """A tensor file violates the format contract."""


@dataclass(frozen=True)
class Matrix:
    """Dense 2-D float32 array: one row per token, one column per feature.

    The backing array is C-contiguous and marked read-only, so a Matrix is
    safe to share across threads after construction.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError(f"expected a 1-D or 2-D array, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"matrix extents must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("matrix contains NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> np.ndarray:
        return self.data[i]

    def tobytes(self) -> bytes:
        """Serialize to the 2-D tensor file encoding."""
        header = _HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT32, 2, 0)
        dims = struct.pack("<QQ", self.rows, self.cols)
        return header + dims + self.data.astype("<f4", copy=False).tobytes()


def write_tensor(path: str | Path, m: Matrix) -> None:
    """Write a matrix as a 2-D tensor file; round-trips bit-exactly."""
    Path(path).write_bytes(m.tobytes())


def write_vector(path: str | Path, vec: np.ndarray) -> None:
    """Write a 1-D float32 tensor file (loads back as a 1xN matrix)."""
    arr = np.asarray(vec, dtype=np.float32).reshape(-1)
    if arr.size < 1:
        raise ValueError("vector must have at least one element")
    if not np.isfinite(arr).all():
        raise ValueError("vector contains NaN or Inf")
    header = _HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT32, 1, 0)
    dims = struct.pack("<Q", arr.size)
    Path(path).write_bytes(header + dims + arr.astype("<f4", copy=False).tobytes())


def read_tensor(path: str | Path) -> Matrix:
    """Load a tensor file, validating every header field and the payload."""
    return parse_tensor(Path(path).read_bytes())


def parse_tensor(blob: bytes) -> Matrix:
    """Decode tensor file bytes into a Matrix.

    Raises TensorFormatError for any malformed input: wrong magic,
    unsupported version or dtype, bad dimension count, zero extents,
    payload size mismatch, or non-finite values.
    """
    if len(blob) < _HEADER.size:
        raise TensorFormatError(f"file too short for header ({len(blob)} bytes)")
    magic, version, dtype_code, ndim, reserved = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise TensorFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise TensorFormatError(f"unsupported format version {version}")
    if dtype_code != DTYPE_FLOAT32:
        raise TensorFormatError(f"unsupported dtype code {dtype_code}")
    if ndim not in (1, 2):
        raise TensorFormatError(f"unsupported dimension count {ndim}")
    if reserved != 0:
        raise TensorFormatError(f"reserved header bytes must be zero, got {reserved}")

    dims_end = _HEADER.size + 8 * ndim
    if len(blob) < dims_end:
        raise TensorFormatError("file too short for dimension list")
    dims = struct.unpack_from(f"<{ndim}Q", blob, _HEADER.size)
    if any(d == 0 for d in dims):
        raise TensorFormatError(f"zero extent in dims {dims}")

    count = math.prod(dims)
    payload = blob[dims_end:]
    if len(payload) != 4 * count:
        raise TensorFormatError(
            f"payload holds {len(payload)} bytes, dims {dims} require {4 * count}"
        )
    values = np.frombuffer(payload, dtype="<f4")
    if not np.isfinite(values).all():
        raise TensorFormatError("payload contains NaN or Inf")
    shape = (1, dims[0]) if ndim == 1 else (dims[0], dims[1])
    return Matrix(values.reshape(shape))
