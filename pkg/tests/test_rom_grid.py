import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myoretarget.anatomy import ModelError, Pose
from myoretarget.rom import (RomGrid, decode_grid, encode_grid, grid_error_rate,
                             grid_to_csv, rom_grid)

from conftest import make_hinge


def test_all_permissive_model_fills_grid(toy):
    huge = toy.with_muscles(
        [m.with_lengths(10.0, 10.0 * m.ratio if m.ratio else 0.0)
         for m in toy.muscles])
    grid = rom_grid(huge, "femur_l", (4, 6, 6))
    assert grid.cells.all()


def test_default_resolution_cell_count(toy):
    grid = rom_grid(toy, "femur_l")
    assert grid.resolution == (18, 36, 36)
    assert grid.cell_count == 23328


def test_revolute_grid_is_one_dimensional():
    model, _ = make_hinge()
    grid = rom_grid(model, "link", (64,))
    assert grid.resolution == (64,)
    assert 0 < grid.true_count < 64


def test_unknown_joint_raises(toy):
    with pytest.raises(ModelError, match="unknown bone"):
        rom_grid(toy, "nope", (4, 6, 6))


def test_error_rate_identity_and_complement(toy):
    grid = rom_grid(toy, "femur_l", (4, 6, 6))
    assert grid_error_rate(grid, grid) == 0.0
    flipped = RomGrid(grid.joint_id, grid.resolution, ~grid.cells, grid.frame)
    assert grid_error_rate(grid, flipped) == 100.0


def test_error_rate_resolution_mismatch(toy):
    a = rom_grid(toy, "femur_l", (4, 6, 6))
    b = rom_grid(toy, "femur_l", (4, 6, 8))
    with pytest.raises(ModelError, match="resolution mismatch"):
        grid_error_rate(a, b)


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=40, deadline=None)
def test_error_rate_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    shape = (3, 4, 4)
    a = RomGrid("j", shape, rng.random(shape) > 0.5)
    b = RomGrid("j", shape, rng.random(shape) > 0.5)
    c = RomGrid("j", shape, rng.random(shape) > 0.5)
    ab = grid_error_rate(a, b)
    assert ab == grid_error_rate(b, a)
    assert (ab == 0.0) == np.array_equal(a.cells, b.cells)
    assert ab <= grid_error_rate(a, c) + grid_error_rate(c, b) + 1e-12


def test_encode_decode_round_trip(toy):
    grid = rom_grid(toy, "femur_l", (6, 8, 8))
    decoded = decode_grid(encode_grid(grid))
    assert decoded == grid
    np.testing.assert_allclose(decoded.frame, grid.frame, atol=1e-15)


def test_encode_decode_one_dimensional():
    model, _ = make_hinge()
    grid = rom_grid(model, "link", (48,))
    assert decode_grid(encode_grid(grid)) == grid


def test_decode_rejects_garbage():
    with pytest.raises(ModelError):
        decode_grid("not a grid")
    with pytest.raises(ModelError):
        decode_grid("romgrid-1\njoint j\nresolution 2 2 2\n"
                    "frame 1 0 0 0 1 0 0 0 1\nfirst 1\nruns 3\n")


def test_csv_dump_row_count(toy):
    grid = rom_grid(toy, "femur_l", (3, 4, 4))
    lines = grid_to_csv(grid).strip().splitlines()
    assert lines[0] == "twist,azimuth,polar,valid"
    assert len(lines) == 1 + grid.cell_count


def test_knee_conditioning_widens_hip_grid(toy):
    # biarticular hamstrings: flexed knee frees the hip
    counts = []
    for knee in (0.0, np.radians(30), np.radians(60), np.radians(90)):
        pose = Pose(joint_coords={"tibia_l": float(knee)})
        counts.append(rom_grid(toy, "femur_l", (8, 12, 12),
                               conditioning_pose=pose).true_count)
    assert counts[1] > counts[0]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
