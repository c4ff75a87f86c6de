"""Regenerate the checked-in fixture tensors.

``patches_576x8.trimt`` is a 24x24 patch grid with an analytically planted
outlier region: 123 "high" tokens share direction (1, 1, 0, ...) against
the text vector (1, 0, ...), giving cosine 1/sqrt(2); the remaining 453
tokens are orthogonal to the text, giving cosine exactly 0. Both quartiles
of the softmax scores land on the low level, so the adaptive rule selects
exactly the 123 planted tokens. Per-row positive scaling varies the
magnitudes without touching any cosine.

Run from the repository root:  python3 tests/fixtures/make_fixtures.py
"""

from pathlib import Path

import numpy as np

from trim import Matrix, write_tensor, write_vector

GRID_SIDE = 24
DIM = 8

HERE = Path(__file__).resolve().parent


def planted_positions() -> list[int]:
    """123 flat indices: an 11x11 block plus two cells above it."""
    cells = [(r, c) for r in range(6, 17) for c in range(6, 17)]
    cells += [(5, 6), (5, 7)]
    assert len(cells) == 123
    return sorted(r * GRID_SIDE + c for r, c in cells)


def build_patches() -> Matrix:
    n = GRID_SIDE * GRID_SIDE
    rows = np.zeros((n, DIM), dtype=np.float32)
    rows[:, 1] = 1.0  # background: orthogonal to the text direction
    planted = planted_positions()
    rows[planted, 0] = 1.0  # planted: cosine 1/sqrt(2) against the text
    scale = (0.5 + (np.arange(n) % 7) / 10.0).astype(np.float32)
    return Matrix(rows * scale[:, np.newaxis])


def main() -> None:
    write_tensor(HERE / "patches_576x8.trimt", build_patches())
    text = np.zeros(DIM, dtype=np.float32)
    text[0] = 1.0
    write_vector(HERE / "text_8.trimt", text)
    print(f"wrote fixtures to {HERE}")


if __name__ == "__main__":
    main()
