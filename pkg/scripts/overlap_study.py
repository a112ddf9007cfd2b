"""Raster overlap of the Rauzy subtiles against resolution, counting hits versus depositing volume.

    python scripts/overlap_study.py --indices 1,-1,-5 --resolutions 128,256
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from _common import parse_config, write_json
from tenttile.boundary import dimension_report
from tenttile.rauzy import depth_for_cell, gifs_for, raster_overlap_fraction, render_rauzy


@dataclass(frozen=True)
class Config:
    indices: tuple[int, ...] = (1, 3, 5, -1, -3, -5)
    resolutions: tuple[int, ...] = (64, 128, 256)
    out: Path = Path("results/overlap")


def main(cfg: Config) -> None:
    rows = []
    for i in cfg.indices:
        gifs, _ = gifs_for(i)
        dim = dimension_report(i).box_dimension
        for res in cfg.resolutions:
            tiles = render_rauzy(gifs, depth_for_cell(gifs, 0.5 / res))
            hit = raster_overlap_fraction(tiles, res, mode="hit")
            mass = raster_overlap_fraction(tiles, res, mode="mass")
            print(f"{i:>3} boundary dim {dim:.3f} res {res:>4} hit {hit:7.2%} mass {mass:7.2%}", flush=True)
            rows.append({"index": i, "boundary_dimension": dim, "resolution": res, "hit": hit, "mass": mass})
    write_json(cfg.out / "overlap.json", rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
