"""Rauzy fractal GIFS, walk rendering and the subtile <-> tent-tile correspondences."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .geometry import (DEFAULT_BUDGET, AffineMap, BudgetExceeded, EmbeddingMap, ExactAffine, PointCloud,
                       build_embedding, cloud_diameter, hausdorff_distance, render_tent_tile, tent_ifs_exact)
from .numberfield import FieldElement, SpecialPisotRecord, beta_of, conjugates, registry_lookup
from .spectral import PerronData, perron_data
from .substitution import Correspondence, PrefixGraph, Substitution, abelianize, prefix_graph, substitution_for


@dataclass(frozen=True)
class GifsEdge:
    source: int
    target: int
    prefix: tuple
    shift: FieldElement  # <l(U), u>; the numeric translation is -Psi(shift)
    translation: np.ndarray


@dataclass
class RauzyGifs:
    """Edges a ->U b with maps x -> pi(l(U)) + h(x) in contracting-space coordinates."""

    size: int
    graph: PrefixGraph
    edges: list[GifsEdge]
    linear: np.ndarray
    contraction: float  # |lambda_1|
    emb: EmbeddingMap
    perron: PerronData

    def edge_map(self, e: GifsEdge) -> AffineMap:
        return AffineMap(self.linear, e.translation)

    def exact_edge_map(self, e: GifsEdge) -> ExactAffine:
        return ExactAffine(-e.shift, self.perron.lambda0)

    @property
    def radius(self) -> float:
        """Ball about the origin containing every subtile."""
        tmax = max(float(np.linalg.norm(e.translation)) for e in self.edges)
        return tmax / (1.0 - self.contraction)


def rauzy_gifs(sigma: Substitution, perron: PerronData, emb: EmbeddingMap) -> RauzyGifs:
    lam = perron.lambda0
    cj = conjugates(lam, 64)
    c = max(abs(v) + e for v, e in cj)
    if c >= 1:
        raise ValueError("substitution is not Pisot: a conjugate has modulus >= 1")
    g = prefix_graph(sigma)
    edges = []
    for e in g.edges:
        x = abelianize(e.prefix, sigma.size) if e.prefix else np.zeros(sigma.size, dtype=np.int64)
        z = perron.pi_exact([int(v) for v in x])
        edges.append(GifsEdge(e.source, e.target, e.prefix, z, -emb.psi(z)))
    return RauzyGifs(sigma.size, g, edges, emb.mult_matrix(lam), c, emb, perron)


def gifs_for(record_or_index, precision: int = 64) -> tuple[RauzyGifs, Correspondence]:
    rec = record_or_index if isinstance(record_or_index, SpecialPisotRecord) else registry_lookup(record_or_index)
    sigma, corr = substitution_for(rec)
    perron = perron_data(sigma, rec, corr)
    emb = build_embedding(rec, precision)
    return rauzy_gifs(sigma, perron, emb), corr


@dataclass
class RauzySubtiles:
    clouds: list[PointCloud]
    depth: int
    cell_size: float

    def union(self, letters=None) -> PointCloud:
        letters = range(len(self.clouds)) if letters is None else letters
        pts = np.vstack([self.clouds[k].points for k in letters])
        return PointCloud(pts, self.depth, self.cell_size)


def walk_counts(gifs: RauzyGifs, depth: int) -> list[int]:
    counts = np.ones(gifs.size, dtype=object)
    for _ in range(depth):
        nxt = np.zeros(gifs.size, dtype=object)
        for e in gifs.edges:
            nxt[e.source] += counts[e.target]
        counts = nxt
    return [int(x) for x in counts]


def _probe(gifs: RauzyGifs, max_points: int = 200_000) -> tuple[np.ndarray, float]:
    """Base point and a certified bound on sup ||y - base|| over the subtiles."""
    k = 1
    while sum(walk_counts(gifs, k + 1)) <= max_points and k < 60:
        k += 1
    tiles = _render_levels(gifs, k, np.zeros(gifs.emb.d))
    pts = np.vstack(tiles)
    sup0 = float(np.linalg.norm(pts, axis=1).max()) / (1.0 - gifs.contraction ** k)
    base = (pts.min(axis=0) + pts.max(axis=0)) / 2
    spread = float(np.linalg.norm(pts - base, axis=1).max()) + gifs.contraction ** k * sup0
    return base, spread


def _render_levels(gifs: RauzyGifs, depth: int, base: np.ndarray, weights: np.ndarray | None = None):
    lin_t = gifs.linear.T
    level = [base[None, :].copy() for _ in range(gifs.size)]
    mass = None if weights is None else [np.array([w]) for w in weights]
    shrink = abs(float(np.linalg.det(gifs.linear)))
    for _ in range(depth):
        img = [p @ lin_t for p in level]
        parts: list[list[np.ndarray]] = [[] for _ in range(gifs.size)]
        wparts: list[list[np.ndarray]] = [[] for _ in range(gifs.size)]
        for e in gifs.edges:
            parts[e.source].append(img[e.target] + e.translation)
            if mass is not None:
                wparts[e.source].append(mass[e.target] * shrink)
        level = [np.vstack(p) for p in parts]
        if mass is not None:
            mass = [np.concatenate(w) for w in wparts]
    return level if mass is None else (level, mass)


def subtile_volumes(gifs: RauzyGifs) -> np.ndarray:
    """Right Perron vector of the prefix-graph adjacency, summing to one.

    When the subtiles are measure-disjoint their Lebesgue measures are
    proportional to it, because the set equations then add volumes.
    """
    m = gifs.graph.adjacency_counts().astype(float)
    vals, vecs = np.linalg.eig(m)
    v = np.abs(np.real(vecs[:, np.argmax(np.real(vals))]))
    return v / v.sum()


def render_rauzy(gifs: RauzyGifs, depth: int, budget: int = DEFAULT_BUDGET) -> RauzySubtiles:
    """Images of a base point under all length-`depth` walks, per starting letter.

    The base point is the centre of a coarse bounding box; cell_size is
    c^depth times a certified bound on the distance from the base to the tiles.
    Point weights are the volume shares of the pieces, see `subtile_volumes`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if sum(walk_counts(gifs, depth)) > budget:
        raise BudgetExceeded(f"{sum(walk_counts(gifs, depth))} walks exceed the budget {budget}")
    base, spread = _probe(gifs)
    level, mass = _render_levels(gifs, depth, base, subtile_volumes(gifs))
    cell = gifs.contraction ** depth * spread
    return RauzySubtiles([PointCloud(p, depth, cell, None, w) for p, w in zip(level, mass)], depth, cell)


def depth_for_cell(gifs: RauzyGifs, cell: float) -> int:
    _, spread = _probe(gifs)
    return max(1, math.ceil(math.log(cell / spread) / math.log(gifs.contraction)))


def set_equation_residual(gifs: RauzyGifs, tiles: RauzySubtiles) -> list[float]:
    """Hausdorff distance between R(a) and the union of its edge images, per letter."""
    out = []
    lin_t = gifs.linear.T
    for a in range(gifs.size):
        parts = [tiles.clouds[e.target].points @ lin_t + e.translation for e in gifs.edges if e.source == a]
        out.append(hausdorff_distance(tiles.clouds[a].points, np.vstack(parts), hint=2 * tiles.cell_size))
    return out


def attractor_radius_bound(gifs: RauzyGifs, depth: int) -> float:
    """Certified sup of ||x|| over the subtiles.

    Rendering from the origin, every attractor point is p + h^k(y) for a
    rendered point p and a subtile point y, hence sup <= max ||p|| + c^k sup.
    """
    pts = np.vstack(_render_levels(gifs, depth, np.zeros(gifs.emb.d)))
    return float(np.linalg.norm(pts, axis=1).max()) / (1.0 - gifs.contraction ** depth)


def difference_bound(gifs: RauzyGifs, max_points: int = 200_000) -> float:
    """Certified bound on ||x1 - x2|| for x1, x2 in any two subtiles."""
    k = 1
    while sum(walk_counts(gifs, k + 1)) <= max_points and k < 60:
        k += 1
    pts = np.vstack(_render_levels(gifs, k, np.zeros(gifs.emb.d)))
    ck = gifs.contraction ** k
    sup0 = float(np.linalg.norm(pts, axis=1).max()) / (1.0 - ck)
    return cloud_diameter(pts) + 2 * ck * sup0


# -----------------------------------------------------------------------------
# correspondences


def subtile_maps(record: SpecialPisotRecord, corr: Correspondence) -> list[ExactAffine]:
    a = record.alpha
    b = beta_of(record)
    return [ExactAffine(t, m) for t, m in corr.subtiles(a, b)]


@dataclass(frozen=True)
class CorrespondenceReport:
    index: int
    family: str
    parameter: int
    depth: int
    cell_size: float
    diameter: float
    tol: float
    distances: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return all(x <= self.tol for x in self.distances)

    @property
    def relative_cell(self) -> float:
        return self.cell_size / self.diameter

    def to_json(self) -> dict:
        return {"index": self.index, "family": self.family, "parameter": self.parameter, "depth": self.depth,
                "cell_size": self.cell_size, "diameter": self.diameter, "tol": self.tol,
                "distances": list(self.distances), "set_equation_residuals": list(self.residuals),
                "passed": self.passed}


def correspondence_check(record_or_index, depth: int | None = None, tol: float | None = None,
                         rel_cell: float = 1e-3, budget: int = DEFAULT_BUDGET) -> CorrespondenceReport:
    """Compare every rendered subtile R(k) with its affine image of the tent-tile."""
    rec = record_or_index if isinstance(record_or_index, SpecialPisotRecord) else registry_lookup(record_or_index)
    gifs, corr = gifs_for(rec)
    if depth is None:
        probe = render_rauzy(gifs, 4)
        diam = cloud_diameter(probe.union().points)
        depth = depth_for_cell(gifs, rel_cell * diam)
    tiles = render_rauzy(gifs, depth, budget)
    diam = cloud_diameter(tiles.union().points)
    tol = 5 * tiles.cell_size if tol is None else tol
    maps = subtile_maps(rec, corr)
    lips = [float(np.linalg.norm(gifs.emb.mult_matrix(f.m), 2)) for f in maps]
    target = tiles.cell_size / max(lips)
    # thinning trades a little covering radius for far fewer points
    tent = render_tent_tile(rec, target=target, budget=budget).thinned(target / 2)
    dists = []
    for k, f in enumerate(maps):
        xk = tent.transformed(f.numeric(gifs.emb))
        dists.append(hausdorff_distance(tiles.clouds[k], xk, hint=tol))
    res = set_equation_residual(gifs, tiles)
    return CorrespondenceReport(rec.index, corr.family, corr.parameter, depth, tiles.cell_size, diam, tol,
                                tuple(dists), tuple(res))


def tent_tile_from_rauzy(record_or_index, depth: int) -> PointCloud:
    """The tent-tile assembled from subtiles: a union of designated letters, or inverse subtile maps."""
    rec = record_or_index if isinstance(record_or_index, SpecialPisotRecord) else registry_lookup(record_or_index)
    gifs, corr = gifs_for(rec)
    tiles = render_rauzy(gifs, depth)
    if corr.tent_letters is not None:
        return tiles.union(corr.tent_letters)
    maps = subtile_maps(rec, corr)
    pts = []
    cell = 0.0
    for k, f in enumerate(maps):
        inv = f.inverse().numeric(gifs.emb)
        pts.append(inv(tiles.clouds[k].points))
        cell = max(cell, tiles.cell_size * float(np.linalg.norm(inv.linear, 2)))
    return PointCloud(np.vstack(pts), depth, cell)


# -----------------------------------------------------------------------------
# exact certificate


def _tent_words(record: SpecialPisotRecord, max_len: int) -> dict:
    fl, fr = tent_ifs_exact(record)
    table = {}
    frontier = [("", ExactAffine(record.field.zero, record.field.one))]
    for _ in range(max_len + 1):
        nxt = []
        for w, f in frontier:
            table.setdefault(f.key(), w)
            if len(w) < max_len:
                nxt.append((w + "L", f.compose(fl)))
                nxt.append((w + "R", f.compose(fr)))
        frontier = nxt
    return table


def is_complete_code(words) -> bool:
    """Every infinite L/R sequence has a prefix among the words."""
    words = set(words)
    if "" in words:
        return True
    if not words:
        return False
    left = {w[1:] for w in words if w[0] == "L"}
    right = {w[1:] for w in words if w[0] == "R"}
    return is_complete_code(left) and is_complete_code(right)


@dataclass(frozen=True)
class ExactCertificate:
    index: int
    words: tuple[tuple[str, ...], ...]  # per letter: tent words realising the conjugated edge maps
    complete: tuple[bool, ...]
    missing: tuple[tuple[int, tuple], ...]  # (letter, prefix) pairs without a matching word

    @property
    def holds(self) -> bool:
        return not self.missing and all(self.complete)


def exact_correspondence_certificate(record_or_index, max_word: int = 12) -> ExactCertificate:
    """Prove R(k) = T_k(F) symbolically.

    With T_k the subtile maps, each conjugated edge map T_a^-1 g_U T_b must be a
    composition f_w of tent maps, and for each letter the words must form a
    complete code. Then the list T_k(F) satisfies the GIFS set equations, and by
    uniqueness of the invariant list it equals the Rauzy subtiles.
    """
    rec = record_or_index if isinstance(record_or_index, SpecialPisotRecord) else registry_lookup(record_or_index)
    gifs, corr = gifs_for(rec)
    maps = subtile_maps(rec, corr)
    table = _tent_words(rec, max_word)
    per_letter: list[list[str]] = [[] for _ in range(gifs.size)]
    missing = []
    for e in gifs.edges:
        s = maps[e.source].inverse().compose(gifs.exact_edge_map(e)).compose(maps[e.target])
        w = table.get(s.key())
        if w is None:
            missing.append((e.source, e.prefix))
        else:
            per_letter[e.source].append(w)
    complete = tuple(is_complete_code(ws) for ws in per_letter)
    return ExactCertificate(rec.index, tuple(tuple(ws) for ws in per_letter), complete, tuple(missing))


def raster_overlap_fraction(tiles: RauzySubtiles, resolution: int = 256, mode: str = "mass") -> float:
    """Share of covered raster cells covered twice or more by the subtiles.

    mode="hit" counts a cell for every subtile with a point in it; cells met by
    a shared boundary then count as overlap, which decays only like
    resolution^(dim boundary - d). mode="mass" deposits the piece volumes and
    rounds against the mass of a fully covered cell, estimated from the largest
    subtile alone.
    """
    if mode not in ("mass", "hit"):
        raise ValueError("mode must be 'mass' or 'hit'")
    allp = tiles.union().points
    lo = allp.min(axis=0)
    span = float((allp.max(axis=0) - lo).max()) * (1 + 1e-9)
    d = allp.shape[1]
    shape = (resolution,) * d
    total = np.zeros(int(np.prod(shape)))
    for c in tiles.clouds:
        idx = np.floor((c.points - lo) / span * resolution).astype(np.int64).clip(0, resolution - 1)
        flat = np.ravel_multi_index(tuple(idx.T), shape)
        if mode == "hit":
            total[np.unique(flat)] += 1
        else:
            total += np.bincount(flat, weights=c.weights, minlength=total.size)
    if mode == "mass":
        big = max(tiles.clouds, key=lambda c: c.weights.sum())
        full = _full_cell_mass((big.points - lo) / span * resolution, big.weights)
        total = np.rint(total / full)
    covered = total >= 1
    return float((total >= 2).sum() / max(covered.sum(), 1))


def _full_cell_mass(q: np.ndarray, w: np.ndarray, quantile: float = 0.9) -> float:
    # partial cells only lower the mass, so take an upper mass-weighted quantile
    idx = np.floor(q).astype(np.int64)
    idx -= idx.min(axis=0)
    flat = np.ravel_multi_index(tuple(idx.T), tuple(idx.max(axis=0) + 1))
    per_cell = np.sort(np.bincount(flat, weights=w))
    per_cell = per_cell[per_cell > 0]
    cum = np.cumsum(per_cell)
    return float(per_cell[np.searchsorted(cum, quantile * cum[-1])])
