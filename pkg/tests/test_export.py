from hypothesis import given, strategies as st
import numpy as np

from tenttile.export import (
    label_grid, raster, read_pgm, read_voxels, write_csv, write_pgm, write_svg_cells, write_svg_segment,
    write_voxels,
)

grids3 = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n ** 3, max_size=n ** 3).map(lambda v: np.array(v).reshape(n, n, n)))


@given(grids3)
def test_voxel_round_trip(tmp_path_factory, grid):
    path = tmp_path_factory.mktemp("vox") / "g.json"
    write_voxels(path, grid, np.zeros(3), 0.5)
    np.testing.assert_array_equal(read_voxels(path), grid)


def test_pgm_orientation_and_round_trip(tmp_path):
    grid = np.zeros((4, 3), dtype=int)
    grid[0, 2] = 1  # x = 0, largest y: top-left pixel
    img = read_pgm(write_pgm(tmp_path / "a.pgm", grid))
    assert img.shape == (3, 4)
    assert img[0, 0] == 255 and img.sum() == 255


def test_raster_puts_extreme_points_inside():
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [0.5, 1.0]])
    grid, lo, cell = raster(pts, 8)
    assert grid.sum() == 3
    assert grid[0, 0] == 1 and grid[3, 7] == 1
    labels = label_grid(pts, np.array([0, 1, 2]), 8)
    assert set(np.unique(labels)) == {0, 1, 2, 3}


def test_csv_has_header_and_full_precision(tmp_path):
    pts = np.array([[1 / 3, -2.0]])
    text = write_csv(tmp_path / "p.csv", pts, np.array([4])).read_text().splitlines()
    assert text[0] == "letter,x0,x1"
    assert text[1] == "4,0.333333333333,-2.000000000000"


def test_svg_outputs_are_wellformed(tmp_path):
    import xml.etree.ElementTree as ET
    ET.parse(write_svg_segment(tmp_path / "s.svg", -1.618, 0.0))
    ET.parse(write_svg_cells(tmp_path / "c.svg", np.eye(5, dtype=bool)))
