"""Grid rendering: text matrices and binary graymaps."""

import io

import numpy as np
import pytest

from trim.render import grid_to_pgm, grid_to_text


def test_constant_grid_maps_to_mid_gray():
    pgm = grid_to_pgm(np.full((3, 3), 0.125))
    header = b"P5\n3 3\n255\n"
    assert pgm.startswith(header)
    assert pgm[len(header):] == bytes([128] * 9)


def test_min_max_stretch():
    grid = np.array([[0.0, 1.0], [0.5, 0.25]])
    pgm = grid_to_pgm(grid)
    assert pgm.endswith(bytes([0, 255, 128, 64]))


def test_header_dimensions_are_width_then_height():
    pgm = grid_to_pgm(np.zeros((2, 5)))
    assert pgm.startswith(b"P5\n5 2\n255\n")
    assert len(pgm) == len(b"P5\n5 2\n255\n") + 10


def test_rejects_non_2d():
    with pytest.raises(ValueError):
        grid_to_pgm(np.zeros(4))


def test_text_round_trips_values():
    rng = np.random.default_rng(5)
    grid = rng.uniform(size=(4, 6))
    parsed = np.loadtxt(io.StringIO(grid_to_text(grid)))
    assert parsed.shape == (4, 6)
    assert parsed == pytest.approx(grid, abs=1e-8)
