"""Lattice tilings by tent-tiles (and their point reflections), checked on a raster.

Two raster modes are offered.

``mass`` (default): every cloud point carries the measure share |det| of its
leaf map, so depositing a translate into the grid approximates the volume of
(cell intersected with translate). Dividing by the mass of a fully covered
cell (estimated from a single translate, without using the lattice) and
rounding gives the covering multiplicity of the cell.

``hit``: a cell counts a translate as soon as one cloud point lands in it.
Cells along tile boundaries are then counted by every neighbour, so this mode
over-reports on fractal boundaries; it is kept as the literal definition and
for the boundary dilation test.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy import ndimage

from .boundary import enumerate_lattice
from .geometry import (ExactAffine, build_embedding, render_tent_measure, render_tent_tile, tent_barycenter,
                       tent_interval_exact, verify_interval_lattice_tiling)
from .numberfield import FieldElement, beta_of, registry_lookup
from .reference import TILING_STATUS


class UnknownTiling(ValueError):
    """The record has no known lattice tiling."""


class InsufficientDepth(ValueError):
    pass


@dataclass(frozen=True)
class TilingSpec:
    index: int
    basis: tuple[FieldElement, ...]
    protos: tuple[ExactAffine, ...]  # placements of the tile: identity, or x -> center - x
    reflection_center: FieldElement | None
    status: str

    @property
    def dim(self) -> int:
        return registry_lookup(self.index).degree - 1

    def lattice_matrix(self, precision: int = 64) -> np.ndarray:
        emb = build_embedding(registry_lookup(self.index), precision)
        return np.array([emb.psi(b) for b in self.basis])

    def gram_determinant(self, precision: int = 64) -> float:
        m = self.lattice_matrix(precision)
        return float(np.linalg.det(m @ m.T))

    def doubled(self, axis: int = 0) -> "TilingSpec":
        """Same spec with one basis vector doubled; used as a negative control."""
        basis = list(self.basis)
        basis[axis] = basis[axis] * 2
        return replace(self, basis=tuple(basis))

    def without_translates(self) -> "TilingSpec":
        return replace(self, protos=())

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "status": self.status,
            "basis": [list(map(str, b.coeffs)) for b in self.basis],
            "reflected": len(self.protos) > 1,
            "reflection_center": None if self.reflection_center is None
            else list(map(str, self.reflection_center.coeffs)),
        }


def tiling_spec(record_or_index) -> TilingSpec:
    i = record_or_index if isinstance(record_or_index, int) else record_or_index.index
    if i == 0:
        raise ValueError("index 0 has no tent-tile")
    rec = registry_lookup(i)
    a = rec.alpha
    b = beta_of(rec)
    one = a.field.one
    zero = a.field.zero
    status = TILING_STATUS[i]
    ident = ExactAffine(zero, one)
    if status == "unknown":
        return TilingSpec(i, (), (), None, status)
    if i in (-2, 2):
        return TilingSpec(i, (tent_interval_exact(i).lattice_step,), (ident,), None, status)
    bases = {
        1: ([b - a, b - a ** 2], None),
        3: ([1 - a, 1 - a ** 2], one),
        -1: ([a - b, a - b ** 2], a),
        -3: ([1 - b, 1 - b ** 2], one),
        4: ([1 - a, 1 - a ** 2, 1 - a ** 3], one),
        -4: ([1 - b, 1 - b ** 2, 1 - b ** 3], None),
    }
    basis, center = bases[i]
    protos = (ident,) if center is None else (ident, ExactAffine(center, -one))
    return TilingSpec(i, tuple(basis), protos, center, status)


@dataclass
class CoverageHistogram:
    index: int
    mode: str
    window_lo: np.ndarray
    window_hi: np.ndarray
    resolution: int
    counts: dict[int, int]
    modal: int
    boundary_fraction: float
    translates: int
    margin: float
    misfit_near_boundary: float | None = None
    rounding_margin: float | None = None  # mass mode: 0.5 minus the worst distance to an integer
    ambiguous_fraction: float | None = None  # mass mode: cells more than 0.25 away from an integer
    degree_estimate: float | None = None  # mass mode: protos * estimated tile volume / covolume
    grid: np.ndarray | None = field(default=None, repr=False)

    @property
    def total(self) -> int:
        return int(sum(self.counts.values()))

    def fraction(self, k: int) -> float:
        return self.counts.get(k, 0) / max(self.total, 1)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "mode": self.mode,
            "window": {"lo": [float(v) for v in self.window_lo], "hi": [float(v) for v in self.window_hi]},
            "resolution": self.resolution,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "modal": self.modal,
            "boundary_fraction": self.boundary_fraction,
            "translates": self.translates,
            "misfit_near_boundary": self.misfit_near_boundary,
            "rounding_margin": self.rounding_margin,
            "ambiguous_fraction": self.ambiguous_fraction,
            "degree_estimate": self.degree_estimate,
        }


def default_resolution(dim: int) -> int:
    return {1: 4096, 2: 512, 3: 128}[dim]


def coverage_estimate(spec: TilingSpec, window_scale: float = 4.0, resolution: int | None = None,
                      depth: int | None = None, *, mode: str = "mass", margin: float = 1.5,
                      leaves_per_cell: float = 64.0, precision: int = 64,
                      budget: int | None = None) -> CoverageHistogram:
    """Multiplicity histogram of the placed translates over a square window around the tile.

    In mass mode the tile measure is sampled by pieces of measure about
    cell volume / `leaves_per_cell`; `depth` forces a uniform word length
    instead. Hit mode renders clouds with covering radius at most cell/2.
    """
    if spec.status == "unknown":
        raise UnknownTiling(f"no known lattice tiling for index {spec.index}")
    if mode not in ("mass", "hit"):
        raise ValueError("mode must be 'mass' or 'hit'")
    if spec.dim == 1:
        return _coverage_interval(spec, window_scale, resolution or default_resolution(1), mode, margin)
    rec = registry_lookup(spec.index)
    d = spec.dim
    res = resolution or default_resolution(d)
    kw = {} if budget is None else {"budget": budget}

    probe = render_tent_measure(rec, 1e-4, precision=precision, **kw)
    diam = probe.diameter() + 2 * probe.cell_size
    centroid = tent_barycenter(rec, precision)
    side = window_scale * diam
    lo = centroid - side / 2
    delta = side / res
    if depth is not None:
        cloud = render_tent_tile(rec, depth=depth, precision=precision, **kw)
        if mode == "hit" and cloud.cell_size > delta / 2:
            raise InsufficientDepth(f"depth {depth} gives cell_size {cloud.cell_size:.3g} > cell/2 = {delta / 2:.3g}")
    elif mode == "mass":
        # the lattice covolume only sets the sampling density; the verdict never uses it
        full = _reference_tile_volume(rec, precision)
        cloud = render_tent_measure(rec, min(delta ** d / full / leaves_per_cell, 0.5), precision=precision, **kw)
    else:
        cloud = render_tent_tile(rec, target=delta / 2, precision=precision, **kw)

    emb = build_embedding(rec, precision)
    lat = spec.lattice_matrix(precision) if spec.basis else np.zeros((0, d))
    n_cells = res ** d
    mass = np.zeros(n_cells)
    hits = np.zeros(n_cells, dtype=np.int32)
    owner = np.full(n_cells, -1, dtype=np.int64)
    shared = np.zeros(n_cells, dtype=bool)
    placed = 0
    reach = side / 2 * math.sqrt(d) + margin * diam
    for proto in spec.protos:
        f = proto.numeric(emb)
        q = (f(cloud.points) - lo) / delta
        pc = f(centroid[None])[0]
        qlo, qhi = q.min(axis=0), q.max(axis=0)
        for xi in _lattice_points(lat, centroid - pc, reach):
            shift = (xi @ lat) / delta if len(xi) else np.zeros(d)
            if np.any(qhi + shift < 0) or np.any(qlo + shift >= res):
                continue  # the translate misses the window
            _deposit(q + shift, cloud.weights, res, mass, hits, owner, shared, placed)
            placed += 1
    volume_mass = _cell_volume_mass((cloud.points - lo) / delta, cloud.weights)
    # covering degree implied by the estimated tile volume: protos * vol(F) / covolume
    covol = abs(float(np.linalg.det(lat))) if lat.shape[0] == d else math.inf
    degree = len(spec.protos) * (delta ** d / volume_mass) / covol
    if mode == "mass":
        ratio = mass / volume_mass
        mult = np.rint(ratio).astype(np.int64)
    else:
        mult = hits.astype(np.int64)
    shape = (res,) * d
    mult = mult.reshape(shape)
    values, freq = np.unique(mult, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(values, freq)}
    modal = int(values[np.argmax(freq)])
    misfit = mult != modal
    near = None
    if misfit.any():
        edge = ndimage.binary_dilation(shared.reshape(shape), structure=np.ones((3,) * d, dtype=bool))
        near = float((misfit & edge).sum() / misfit.sum())
    hist = CoverageHistogram(spec.index, mode, lo, lo + side, res, counts, modal,
                             float(misfit.mean()), placed, margin, near, grid=mult)
    if mode == "mass":
        off = np.abs(ratio - np.rint(ratio))
        hist.rounding_margin = float(0.5 - off.max())
        hist.ambiguous_fraction = float((off > 0.25).mean())
        hist.degree_estimate = float(degree)
    return hist


def _reference_tile_volume(rec, precision) -> float:
    ref = tiling_spec(rec.index)
    return abs(float(np.linalg.det(ref.lattice_matrix(precision)))) / len(ref.protos)


def _lattice_points(lat: np.ndarray, center: np.ndarray, radius: float):
    if lat.shape[0] == 0:
        return [()]
    return [np.array(c, dtype=float) for c in enumerate_lattice(lat, center, radius)]


def _deposit(q, w, res, mass, hits, owner, shared, tag) -> None:
    idx = np.floor(q).astype(np.int64)
    ok = np.all((idx >= 0) & (idx < res), axis=1)
    if not ok.any():
        return
    flat = np.ravel_multi_index(tuple(idx[ok].T), (res,) * q.shape[1])
    mass += np.bincount(flat, weights=w[ok], minlength=mass.size)
    prev = owner[flat]
    fresh = prev != tag
    cells = flat[fresh]
    shared[cells[prev[fresh] >= 0]] = True
    owner[cells] = tag
    hits[np.unique(cells)] += 1


def _cell_volume_mass(q: np.ndarray, w: np.ndarray, quantile: float = 0.9) -> float:
    """Mass one tile puts into a fully covered cell.

    Partially covered cells only lower the mass, and at desk resolutions a
    3-D tile has few fully covered cells, so an upper mass-weighted quantile
    of the single-tile cell masses is used rather than the median.
    """
    idx = np.floor(q).astype(np.int64)
    idx -= idx.min(axis=0)
    flat = np.ravel_multi_index(tuple(idx.T), tuple(idx.max(axis=0) + 1))
    per_cell = np.bincount(flat, weights=w)
    per_cell = np.sort(per_cell[per_cell > 0])
    cum = np.cumsum(per_cell)
    return float(per_cell[np.searchsorted(cum, quantile * cum[-1])])


def _coverage_interval(spec: TilingSpec, window_scale, res, mode, margin) -> CoverageHistogram:
    iv = tent_interval_exact(spec.index)
    a, b = iv.numeric()
    length = b - a
    step = spec.lattice_matrix()[0, 0] if spec.basis else 0.0
    side = window_scale * length
    lo = (a + b) / 2 - side / 2
    edges = lo + side * np.arange(res + 1) / res
    cover = np.zeros(res)
    hits = np.zeros(res, dtype=np.int64)
    placed = 0
    if spec.protos and step:
        kmax = int(math.ceil((side / 2 + margin * length) / abs(step))) + 1
        for k in range(-kmax, kmax + 1):
            placed += 1
            overlap = np.clip(np.minimum(edges[1:], b + k * step) - np.maximum(edges[:-1], a + k * step), 0, None)
            cover += overlap
            hits += overlap > 0
    delta = side / res
    mult = np.rint(cover / delta).astype(np.int64) if mode == "mass" else hits
    values, freq = np.unique(mult, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(values, freq)}
    modal = int(values[np.argmax(freq)])
    return CoverageHistogram(spec.index, mode, np.array([lo]), np.array([lo + side]), res, counts, modal,
                             float((mult != modal).mean()), placed, margin, None, grid=mult)


@dataclass
class TilingVerdict:
    index: int
    passed: bool
    threshold: float
    histogram: CoverageHistogram
    exact: bool | None = None  # exact 1-D check when available
    negative_control: CoverageHistogram | None = None

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "passed": self.passed,
            "threshold": self.threshold,
            "histogram": self.histogram.to_json(),
            "exact": self.exact,
        }
        if self.negative_control is not None:
            out["negative_control"] = self.negative_control.to_json()
        return out


def verify_tiling(record_or_index, *, threshold: float = 0.02, window_scale: float = 4.0,
                  resolution: int | None = None, depth: int | None = None, mode: str = "mass",
                  spec: TilingSpec | None = None, negative_control: bool = False) -> TilingVerdict:
    """Pass iff the modal multiplicity is 1 and at most `threshold` of the cells differ from it."""
    spec = spec or tiling_spec(record_or_index)
    if spec.status == "unknown":
        raise UnknownTiling(f"no known lattice tiling for index {spec.index}")
    hist = coverage_estimate(spec, window_scale, resolution, depth, mode=mode)
    passed = hist.modal == 1 and hist.boundary_fraction <= threshold
    exact = None
    if spec.dim == 1:
        exact = verify_interval_lattice_tiling(tent_interval_exact(spec.index))
        passed = passed and exact
    neg = None
    if negative_control:
        neg = coverage_estimate(spec.doubled(), window_scale, resolution, depth, mode=mode)
    return TilingVerdict(spec.index, passed, threshold, hist, exact, neg)


def control_fails(hist: CoverageHistogram, threshold: float = 0.02) -> bool:
    return not (hist.modal == 1 and hist.boundary_fraction <= threshold)
