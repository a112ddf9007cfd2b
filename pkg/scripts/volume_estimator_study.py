"""How well do single-tile raster statistics estimate the mass of a fully covered cell?

For each record the tile measure is deposited on grids of several resolutions
and the full-cell mass is estimated by the mass-weighted median and by upper
quantiles. Multiplying by protos / covolume gives the implied covering degree,
which is 1 for a correct estimator.

    python scripts/volume_estimator_study.py --indices 1,4 --resolutions 64,128
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from _common import parse_config, write_json
from tenttile.geometry import render_tent_measure
from tenttile.numberfield import registry_lookup
from tenttile.tiling import tiling_spec


@dataclass(frozen=True)
class Config:
    indices: tuple[int, ...] = (1, 3, -1, -3, 4, -4)
    resolutions: tuple[int, ...] = (64, 128, 256)
    quantiles: tuple[float, ...] = (0.5, 0.75, 0.9, 0.95)
    leaves_per_cell: float = 64.0
    out: Path = Path("results/volume_estimator")


def cell_masses(points, weights, lo, delta):
    idx = np.floor((points - lo) / delta).astype(np.int64)
    idx -= idx.min(axis=0)
    flat = np.ravel_multi_index(tuple(idx.T), tuple(idx.max(axis=0) + 1))
    per = np.bincount(flat, weights=weights)
    return np.sort(per[per > 0])


def main(cfg: Config) -> None:
    rows = []
    for i in cfg.indices:
        rec = registry_lookup(i)
        spec = tiling_spec(i)
        covol = abs(float(np.linalg.det(spec.lattice_matrix())))
        vol = covol / len(spec.protos)
        probe = render_tent_measure(rec, 1e-4)
        diam = probe.diameter()
        for res in cfg.resolutions:
            if spec.dim == 3 and res > 128:
                continue
            delta = 4 * diam / res  # same cell size as a window of four diameters
            mass = min(delta ** spec.dim / vol / cfg.leaves_per_cell, 0.5)
            cloud = render_tent_measure(rec, mass)
            per = cell_masses(cloud.points, cloud.weights, cloud.points.min(axis=0), delta)
            cum = np.cumsum(per)
            est = {q: float(per[np.searchsorted(cum, q * cum[-1])]) for q in cfg.quantiles}
            degree = {q: len(spec.protos) * delta ** spec.dim / e / covol for q, e in est.items()}
            cells = len(per)
            print(f"{i:>3} res {res:>4} cells/tile {cells:>7} " +
                  " ".join(f"q{q:g}:{d:.3f}" for q, d in degree.items()), flush=True)
            rows.append({"index": i, "resolution": res, "cells_per_tile": cells,
                         "degree": {str(q): d for q, d in degree.items()}})
    write_json(cfg.out / "estimators.json", rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
