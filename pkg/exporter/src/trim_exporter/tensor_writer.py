"""Writer for the tensor file format consumed by the trim package.

Implemented directly against the published byte layout so this package
depends on trim only at its file-format boundary:

    bytes 0-7    magic "TRIMTNSR"
    bytes 8-11   version, u32 LE (= 1)
    byte  12     dtype code (0 = float32)
    byte  13     ndim (1 or 2)
    bytes 14-15  reserved, zero
    next         ndim x u64 LE extents
    rest         row-major float32 payload
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"TRIMTNSR"
VERSION = 1
DTYPE_FLOAT32 = 0


def encode_tensor(array: np.ndarray) -> bytes:
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim not in (1, 2):
        raise ValueError(f"only 1-D and 2-D tensors are supported, got {arr.ndim}-D")
    if arr.size == 0 or min(arr.shape) == 0:
        raise ValueError("tensor extents must be positive")
    if not np.isfinite(arr).all():
        raise ValueError("tensor contains NaN or Inf")
    header = struct.pack("<8sIBBH", MAGIC, VERSION, DTYPE_FLOAT32, arr.ndim, 0)
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    payload = np.ascontiguousarray(arr).astype("<f4", copy=False).tobytes()
    return header + dims + payload


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    Path(path).write_bytes(encode_tensor(array))
