"""Render similarity grids as plain text and 8-bit binary graymaps."""

from __future__ import annotations

import numpy as np

MID_GRAY = 128


def grid_to_text(grid: np.ndarray) -> str:
    """Plain-text matrix, one grid row per line, scientific notation."""
    return "\n".join(
        " ".join(f"{v:.8e}" for v in row) for row in np.asarray(grid, dtype=np.float64)
    ) + "\n"


def grid_to_pgm(grid: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255) of the min-max normalized grid.

    A constant grid has no range to stretch, so it maps to mid-gray.
    """
    arr = np.asarray(grid, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("grid must be a non-empty 2-D array")
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        pixels = np.full(arr.shape, MID_GRAY, dtype=np.uint8)
    else:
        pixels = np.rint((arr - lo) / (hi - lo) * 255.0).astype(np.uint8)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()
