"""File writers: CSV point lists, PGM rasters, SVG drawings and voxel grids."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def write_csv(path: Path, points: np.ndarray, labels: np.ndarray | None = None) -> Path:
    """One point per line, 12 decimals; an optional integer letter column comes first."""
    d = points.shape[1]
    header = ",".join((["letter"] if labels is not None else []) + [f"x{k}" for k in range(d)])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        if labels is None:
            np.savetxt(fh, points, fmt="%.12f", delimiter=",")
        else:
            data = np.column_stack([labels.astype(float), points])
            np.savetxt(fh, data, fmt=["%d"] + ["%.12f"] * d, delimiter=",")
    return path


def raster(points: np.ndarray, resolution: int, lo: np.ndarray | None = None, hi: np.ndarray | None = None,
           values: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray, float]:
    """Occupancy (or last written value) on a cubic grid over the bounding box of the points."""
    lo = points.min(axis=0) if lo is None else lo
    hi = points.max(axis=0) if hi is None else hi
    span = float((hi - lo).max()) or 1.0
    cell = span / (resolution - 1e-9)
    idx = np.floor((points - lo) / cell).astype(np.int64).clip(0, resolution - 1)
    grid = np.zeros((resolution,) * points.shape[1], dtype=np.int32)
    grid[tuple(idx.T)] = 1 if values is None else values
    return grid, lo, cell


def write_pgm(path: Path, grid: np.ndarray, maxval: int | None = None) -> Path:
    """Binary PGM; row 0 is the top of the image (largest second coordinate)."""
    if grid.ndim != 2:
        raise ValueError("PGM needs a 2-D grid")
    img = np.flipud(grid.T)
    top = int(maxval if maxval is not None else max(int(img.max()), 1))
    scaled = (img.astype(np.float64) * (255 / top)).clip(0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{scaled.shape[1]} {scaled.shape[0]}\n255\n".encode())
        fh.write(scaled.tobytes())
    return path


def read_pgm(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


def label_grid(points: np.ndarray, labels: np.ndarray, resolution: int) -> np.ndarray:
    """2-D grid with gray level (letter + 1) for the letter owning each cell."""
    grid, _, _ = raster(points, resolution, values=labels.astype(np.int32) + 1)
    return grid


def write_svg_cells(path: Path, grid: np.ndarray, cell_px: float = 2.0) -> Path:
    """Occupied cells of a 2-D grid as one SVG path of unit squares."""
    if grid.ndim != 2:
        raise ValueError("SVG export is for 1-D and 2-D data")
    n = grid.shape[0]
    xs, ys = np.nonzero(grid)
    cmds = "".join(f"M{x * cell_px:g} {(n - 1 - y) * cell_px:g}h{cell_px:g}v{cell_px:g}h-{cell_px:g}z"
                   for x, y in zip(xs, ys))
    size = n * cell_px
    Path(path).write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
        f'viewBox="0 0 {size:g} {size:g}"><path d="{cmds}" fill="black"/></svg>\n')
    return path


def write_svg_segment(path: Path, lo: float, hi: float, width: float = 400.0) -> Path:
    """An interval as a horizontal segment, with its endpoints labelled."""
    pad = 40.0
    Path(path).write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 2 * pad:g}" height="60">'
        f'<polyline points="{pad:g},30 {pad + width:g},30" stroke="black" stroke-width="3" fill="none"/>'
        f'<text x="{pad:g}" y="52" font-size="12" text-anchor="middle">{lo:.12f}</text>'
        f'<text x="{pad + width:g}" y="52" font-size="12" text-anchor="middle">{hi:.12f}</text></svg>\n')
    return path


def write_voxels(path: Path, grid: np.ndarray, origin: np.ndarray, cell: float) -> Path:
    """3-D occupancy grid as JSON with run-length encoded x-fastest rows."""
    flat = grid.astype(bool).ravel(order="F")
    change = np.flatnonzero(np.diff(np.concatenate([[0], flat.astype(np.int8), [0]])))
    runs = change.reshape(-1, 2)
    payload = {
        "schema": 1,
        "shape": list(grid.shape),
        "origin": [float(v) for v in origin],
        "cell": cell,
        "order": "x-fastest",
        "runs": [[int(a), int(b - a)] for a, b in runs],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path


def read_voxels(path: Path) -> np.ndarray:
    payload = json.loads(Path(path).read_text())
    flat = np.zeros(int(np.prod(payload["shape"])), dtype=bool)
    for start, length in payload["runs"]:
        flat[start:start + length] = True
    return flat.reshape(payload["shape"], order="F")
