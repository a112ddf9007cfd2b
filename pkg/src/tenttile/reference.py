"""Published target values used by the checks and the reproduction report.

Polynomials are stored with ascending integer coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass


def _desc(d: dict[int, int]) -> tuple[int, ...]:
    """Build an ascending coefficient tuple from {exponent: coefficient}."""
    n = max(d)
    return tuple(d.get(k, 0) for k in range(n + 1))


@dataclass(frozen=True)
class BoundaryTarget:
    index: int
    mu_sr_poly: tuple[int, ...]
    mu_sr_approx: float
    dimension: float
    dimension_tol: float
    upper_bound_only: bool


BOUNDARY_TARGETS: dict[int, BoundaryTarget] = {
    1: BoundaryTarget(1, _desc({5: 1, 3: -2, 1: 1, 0: -1}), 1.3626, 1.10026, 1e-4, False),
    3: BoundaryTarget(3, _desc({7: 1, 2: -2, 0: -1}), 1.21746, 1.02952, 1e-4, False),
    5: BoundaryTarget(5, _desc({13: 1, 7: -1, 6: -1, 4: -2, 0: 1}), 1.21389, 1.37858, 1e-4, False),
    -1: BoundaryTarget(-1, _desc({10: 1, 7: -1, 5: -4, 4: -4, 3: -1, 2: -4, 1: -4, 0: 1}),
                       1.61299, 1.70018, 1e-4, False),
    -3: BoundaryTarget(-3, _desc({10: 1, 7: -1, 3: -1, 1: -2, 0: -1}), 1.27004, 1.25074, 1e-4, False),
    -5: BoundaryTarget(-5, _desc({21: 1, 20: -1, 19: 1, 18: -1, 17: 1, 16: -2, 15: 1, 14: -2, 13: 2,
                                  12: -3, 11: 1, 9: 1, 8: -2, 6: -3, 5: -2, 4: -2, 3: -1, 2: -1,
                                  1: 1, 0: 1}),
                       1.31007, 1.92089, 1e-4, False),
    4: BoundaryTarget(4, _desc({15: 1, 8: -4, 6: -2, 5: -2, 3: -2, 0: -1}), 1.31162, 2.74421, 1e-3, True),
    -4: BoundaryTarget(-4, _desc({28: 1, 27: -2, 26: 1, 23: -6, 22: 2, 20: 6, 19: -2, 18: 11, 17: 1,
                                  16: 8, 14: -14, 13: -12, 12: -5, 11: 9, 10: 14, 9: 8, 8: -1,
                                  7: -13, 6: 4, 5: -1, 3: -1, 2: 1, 1: -2, 0: 1}),
                       1.77033, 2.815, 1e-3, True),
}

# Table "lattice tiling" column: yes | w.r. | ? ; the quadratic cases tile with dimension 0 boundaries.
TILING_STATUS: dict[int, str] = {
    -5: "unknown", -4: "tiles", -3: "tiles-with-reflection", -2: "tiles", -1: "tiles-with-reflection",
    1: "tiles", 2: "tiles", 3: "tiles-with-reflection", 4: "tiles-with-reflection", 5: "unknown",
}

TABLE_DIMENSIONS: dict[int, float] = {
    -5: 1.92089, -4: 2.815, -3: 1.25074, -2: 0.0, -1: 1.70018,
    1: 1.10026, 2: 0.0, 3: 1.02952, 4: 2.74421, 5: 1.37858,
}
