"""Boundary dimensions, dominant eigenvalues and tiling-property decisions for the eight substitution cases.

    python scripts/reproduce_table.py --out results/table
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import time

from _common import parse_config, write_json
from tenttile.boundary import build_boundary_graph, dimension_report, graph_dominant_eigenvalue, irreducible_factor
from tenttile.numberfield import format_poly
from tenttile.reference import BOUNDARY_TARGETS


@dataclass(frozen=True)
class Config:
    indices: tuple[int, ...] = (1, 3, 5, -1, -3, -5, 4, -4)
    lattice: bool = False
    out: Path = Path("results/table")


def main(cfg: Config) -> None:
    rows = []
    print(f"{'i':>3} {'dim':>10} {'table':>9} {'|diff|':>9} {'mu_sr':>10} {'V':>6} {'E':>6} {'sec':>6}  factor")
    for i in cfg.indices:
        t0 = time.perf_counter()
        rep = dimension_report(i, with_lattice=cfg.lattice)
        g = build_boundary_graph(i, "sr")
        mu = graph_dominant_eigenvalue(g)
        factor = irreducible_factor(mu.component_poly.coeffs, mu.lower, mu.upper)
        target = BOUNDARY_TARGETS[i]
        row = {**rep.to_json(), "table": target.dimension, "factor": list(factor),
               "seconds": time.perf_counter() - t0}
        rows.append(row)
        print(f"{i:>3} {rep.box_dimension:>10.6f} {target.dimension:>9} {abs(rep.box_dimension - target.dimension):>9.2e}"
              f" {rep.mu_sr:>10.6f} {rep.vertices:>6} {rep.edges:>6} {row['seconds']:>6.1f}  {format_poly(factor)}")
    write_json(cfg.out / "table.json", rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
