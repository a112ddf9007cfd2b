"""Embedding of Q(alpha) into the contracting space, the tent IFS and point clouds."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import functools
import math

import mpmath
import numpy as np
from scipy.spatial import cKDTree, ConvexHull, QhullError

from .numberfield import FieldElement, SpecialPisotRecord, beta_of, registry_lookup, sign_at_dominant_root


@dataclass(frozen=True)
class EmbeddingMap:
    """Psi: Q(alpha) -> R^d, linear over Q with Psi(alpha x) = A Psi(x)."""

    field_id: int
    precision: int
    basis_images: np.ndarray  # shape (n, d): Psi(alpha^j)
    roots: tuple  # conjugate roots used, in block order
    layout: tuple  # block kinds: "real" or "complex"

    @property
    def d(self) -> int:
        return self.basis_images.shape[1]

    def psi(self, x: FieldElement) -> np.ndarray:
        if x.field.field_id != self.field_id:
            raise ValueError("element from another field")
        c = np.array([float(v) for v in x.coeffs])
        return c @ self.basis_images

    def mult_matrix(self, z: FieldElement) -> np.ndarray:
        """Matrix M with Psi(z y) = M Psi(y)."""
        blocks = []
        with mpmath.workdps(40):
            for kind, r in zip(self.layout, self.roots):
                v = complex(z.at(r))
                if kind == "real":
                    blocks.append(np.array([[v.real]]))
                else:
                    blocks.append(np.array([[v.real, -v.imag], [v.imag, v.real]]))
        return _block_diag(blocks)

    def block_moduli(self, z: FieldElement) -> np.ndarray:
        with mpmath.workdps(40):
            return np.array([abs(complex(z.at(r))) for r in self.roots])

    def block_sizes(self) -> list[int]:
        return [1 if k == "real" else 2 for k in self.layout]


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


@dataclass(frozen=True)
class ContractionPair:
    A: np.ndarray
    B: np.ndarray
    psi_one: np.ndarray


def _layout(record: SpecialPisotRecord, precision: int):
    roots = record.field.embeddings(precision)
    reals = [r for r in roots if mpmath.im(r) == 0]
    cplx = [r for r in roots if mpmath.im(r) > 0]
    if len(reals) + 2 * len(cplx) != record.d:
        raise RuntimeError("unexpected conjugate structure")
    # real conjugates first, then one block per complex pair (positive imaginary part)
    layout = tuple(["real"] * len(reals) + ["complex"] * len(cplx))
    return tuple(reals + cplx), layout


def build_embedding(record: SpecialPisotRecord, precision: int = 64) -> EmbeddingMap:
    if record.index == 0:
        raise ValueError("index 0 has no tent-tile")
    roots, layout = _layout(record, precision)
    n = record.degree
    rows = []
    with mpmath.workdps(int(precision * 0.31) + 20):
        for j in range(n):
            row = []
            for kind, r in zip(layout, roots):
                v = complex(r ** j)
                if kind == "real":
                    row.append(v.real)
                else:
                    row.extend([v.real, v.imag])
            rows.append(row)
    return EmbeddingMap(record.index, precision, np.array(rows), roots, layout)


def build_matrices(record: SpecialPisotRecord, precision: int = 64) -> tuple[EmbeddingMap, ContractionPair]:
    emb = build_embedding(record, precision)
    a = emb.mult_matrix(record.alpha)
    b = a @ np.linalg.inv(a - np.eye(emb.d))
    return emb, ContractionPair(a, b, emb.psi(record.field.one))


# -----------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class AffineMap:
    linear: np.ndarray
    translation: np.ndarray

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            return self.linear @ pts + self.translation
        return pts @ self.linear.T + self.translation

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        return AffineMap(self.linear @ other.linear, self.linear @ other.translation + self.translation)

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.translation)

    def spectral_radius(self) -> float:
        return float(max(abs(np.linalg.eigvals(self.linear))))

    @property
    def is_contraction(self) -> bool:
        return self.spectral_radius() < 1


@dataclass(frozen=True)
class ExactAffine:
    """x -> Psi(t) + (multiplication by m) x, with t, m in Q(alpha)."""

    t: FieldElement
    m: FieldElement

    def compose(self, other: "ExactAffine") -> "ExactAffine":
        return ExactAffine(self.t + self.m * other.t, self.m * other.m)

    def inverse(self) -> "ExactAffine":
        inv = self.m.inverse()
        return ExactAffine(-(self.t * inv), inv)

    def numeric(self, emb: EmbeddingMap) -> AffineMap:
        return AffineMap(emb.mult_matrix(self.m), emb.psi(self.t))

    def key(self):
        return (self.t.coeffs, self.m.coeffs)


def tent_ifs_exact(record: SpecialPisotRecord) -> tuple[ExactAffine, ExactAffine]:
    if record.index == 0:
        raise ValueError("index 0 has no tent-tile")
    a = record.alpha
    b = beta_of(record)
    return ExactAffine(a.field.zero, a), ExactAffine(b, -b)


def tent_ifs(record: SpecialPisotRecord, precision: int = 64) -> tuple[AffineMap, AffineMap]:
    emb = build_embedding(record, precision)
    fl, fr = tent_ifs_exact(record)
    return fl.numeric(emb), fr.numeric(emb)


# -----------------------------------------------------------------------------
# point clouds


@dataclass
class PointCloud:
    points: np.ndarray
    depth: int
    cell_size: float
    labels: np.ndarray | None = None
    weights: np.ndarray | None = None  # share of the tile measure carried by each point

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def transformed(self, f: AffineMap, scale: float | None = None) -> "PointCloud":
        lip = float(np.linalg.norm(f.linear, 2)) if scale is None else scale
        return PointCloud(f(self.points), self.depth, self.cell_size * lip, self.labels, self.weights)

    def union(self, other: "PointCloud") -> "PointCloud":
        return PointCloud(np.vstack([self.points, other.points]), max(self.depth, other.depth),
                          max(self.cell_size, other.cell_size))

    def diameter(self) -> float:
        return cloud_diameter(self.points)

    def thinned(self, eps: float) -> "PointCloud":
        """Keep one point per grid cell of side eps; the covering radius grows by eps * sqrt(d)."""
        if eps <= 0 or len(self.points) == 0:
            return self
        cells = np.floor((self.points - self.points.min(axis=0)) / eps).astype(np.int64)
        key = np.zeros(len(cells), dtype=np.int64)
        for j in range(cells.shape[1]):
            key = key * (int(cells[:, j].max()) + 1) + cells[:, j]
        _, first = np.unique(key, return_index=True)
        first.sort()
        labels = None if self.labels is None else self.labels[first]
        weights = None
        if self.weights is not None:
            inv = np.searchsorted(np.sort(key[first]), key)
            order = np.argsort(key[first])
            weights = np.zeros(len(first))
            np.add.at(weights, order[inv], self.weights)
        return PointCloud(self.points[first], self.depth, self.cell_size + eps * math.sqrt(self.dim), labels,
                          weights)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)


def cloud_diameter(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    d = pts.shape[1]
    cand = pts
    if d >= 2 and len(pts) > d + 1:
        try:
            hull = ConvexHull(pts)
            cand = pts[hull.vertices]
        except QhullError:
            cand = pts
    else:
        return float(pts.max() - pts.min()) if d == 1 else float(np.linalg.norm(pts.max(0) - pts.min(0)))
    best = 0.0
    for i in range(0, len(cand), 512):
        diff = cand[i:i + 512, None, :] - cand[None, :, :]
        best = max(best, float(np.sqrt((diff ** 2).sum(-1)).max()))
    return best


class BudgetExceeded(RuntimeError):
    pass


DEFAULT_BUDGET = 12_000_000


def _tent_data(record, precision):
    emb, pair = build_matrices(record, precision)
    fl, fr = tent_ifs_exact(record)
    maps = [fl.numeric(emb), fr.numeric(emb)]
    mods = np.log(np.array([emb.block_moduli(fl.m), emb.block_moduli(fr.m)]))
    c = float(np.exp(mods.max()))
    radius = float(np.linalg.norm(pair.B @ pair.psi_one)) / (1.0 - c)
    return emb, maps, mods, c, radius


def tent_radius(record: SpecialPisotRecord, precision: int = 64) -> float:
    """Radius of a ball about the origin (fixed point of f_L) containing the tent-tile."""
    return _tent_data(record, precision)[4]


def render_tent_tile(record: SpecialPisotRecord, depth: int | None = None, *, target: float | None = None,
                     precision: int = 64, budget: int = DEFAULT_BUDGET) -> PointCloud:
    """Point cloud of the tent-tile.

    With `depth`, every word of that length is applied to the fixed point of
    f_L. With `target`, words are grown until the Lipschitz constant of the
    composed map times the enclosing radius is at most `target`; the leaves
    form a complete prefix code, so the cloud still lies in the tile and
    covers it within `cell_size`.
    """
    emb, maps, mods, c, radius = _tent_data(record, precision)
    d = emb.d
    if depth is not None:
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if 2 ** depth > budget:
            raise BudgetExceeded(f"2^{depth} points exceed the budget {budget}")
        pts = np.zeros((1, d))
        logdet = np.zeros(1)
        dets = mods @ np.array(emb.block_sizes(), dtype=float)
        for _ in range(depth):
            pts = np.vstack([m(pts) for m in maps])
            logdet = np.concatenate([logdet + dets[0], logdet + dets[1]])
        return PointCloud(pts, depth, c ** depth * radius, None, np.exp(logdet))
    if target is None:
        raise ValueError("give either depth or target")
    radii = tent_block_radii(record, precision)
    return _adaptive_render(maps, mods, radius, target, d, budget, np.array(emb.block_sizes(), dtype=float),
                            radii)


@functools.lru_cache(maxsize=None)
def _block_radii_cached(index: int, precision: int, tau: float) -> tuple[float, ...]:
    emb, maps, mods, c, radius = _tent_data(registry_lookup(index), precision)
    sizes = emb.block_sizes()
    starts = np.cumsum([0] + sizes)
    out = []
    for j in range(len(sizes)):
        # leaves whose block-j contraction is <= tau; every point of the tile is within
        # (block-j modulus) * S_j of a leaf point, so S_j <= max |leaf_j| / (1 - tau)
        cloud = _adaptive_render(maps, mods[:, [j]], 1.0, tau, emb.d, DEFAULT_BUDGET)
        block = cloud.points[:, starts[j]:starts[j + 1]]
        out.append(float(np.linalg.norm(block, axis=1).max()) / (1.0 - tau))
    return tuple(out)


def tent_block_radii(record: SpecialPisotRecord, precision: int = 64, tau: float = 0.1) -> np.ndarray:
    """Certified bounds S_j on the norm of the block-j coordinates of tile points (origin = fixed point of f_L)."""
    return np.array(_block_radii_cached(record.index, precision, tau))


def _adaptive_render(maps, logmods, radius, target, d, budget, sizes=None, radii=None,
                     log_mass=None, anchor=None) -> PointCloud:
    # a leaf f_w(F) lies within min(max_j mod_j * radius, sqrt(sum_j (mod_j * S_j)^2)) of f_w(0)
    log_target = math.inf if target is None else math.log(target)
    log_radius = math.log(radius)
    log_radii = None if radii is None else np.log(np.maximum(radii, 1e-300))
    offsets = np.stack([m(np.zeros(d)) for m in maps])  # f_i(x0) - x0 with x0 = 0
    lins = np.stack([m.linear for m in maps])
    P = np.zeros((1, d))
    L = np.eye(d)[None]
    G = np.zeros((1, logmods.shape[1]))
    depth = np.zeros(1, dtype=np.int64)
    done_pts = []
    done_depth = []
    done_lip = []
    done_logdet = []
    total = 0
    while len(P):
        lip = G.max(axis=1) + log_radius
        if log_radii is not None:
            lip = np.minimum(lip, 0.5 * np.logaddexp.reduce(2 * (G + log_radii), axis=1))
        stop = lip <= log_target
        if log_mass is not None:
            stop &= G @ sizes <= log_mass
        if stop.any():
            if anchor is None:
                done_pts.append(P[stop])
            else:
                done_pts.append(P[stop] + L[stop] @ anchor)
            done_depth.append(depth[stop])
            done_lip.append(lip[stop])
            if sizes is not None:
                done_logdet.append(G[stop] @ sizes)
            total += int(stop.sum())
        P, L, G, depth = P[~stop], L[~stop], G[~stop], depth[~stop]
        if not len(P):
            break
        if total + 2 * len(P) > budget * 4:
            raise BudgetExceeded("adaptive rendering exceeds the point budget")
        newP, newL, newG = [], [], []
        for i in range(len(maps)):
            newP.append(P + np.einsum("nij,j->ni", L, offsets[i]))
            newL.append(L @ lins[i])
            newG.append(G + logmods[i])
        P = np.concatenate(newP)
        L = np.concatenate(newL)
        G = np.concatenate(newG)
        depth = np.concatenate([depth + 1] * len(maps))
        if total + len(P) > budget:
            raise BudgetExceeded("adaptive rendering exceeds the point budget")
    pts = np.concatenate(done_pts)
    dep = np.concatenate(done_depth)
    cell = float(np.exp(np.concatenate(done_lip).max()))
    if anchor is not None:
        cell *= 2.0  # the anchor lies in the piece, the piece within `cell` of f_w(0)
    weights = None
    if sizes is not None:
        # |det| of each leaf map; these sum to one because |det A| + |det B| = 1
        weights = np.exp(np.concatenate(done_logdet))
    return PointCloud(pts, int(dep.max()), cell, None, weights)


def tent_barycenter(record: SpecialPisotRecord, precision: int = 64) -> np.ndarray:
    """Barycenter of the normalised Lebesgue measure on the tile.

    That measure is self-affine with weights |det| of the two maps, so the
    barycenter solves b = sum_i |det A_i| f_i(b).
    """
    emb, maps, mods, c, radius = _tent_data(record, precision)
    w = np.exp(mods @ np.array(emb.block_sizes(), dtype=float))
    lhs = np.eye(emb.d) - sum(wi * m.linear for wi, m in zip(w, maps))
    rhs = sum(wi * m.translation for wi, m in zip(w, maps))
    return np.linalg.solve(lhs, rhs)


def render_tent_measure(record: SpecialPisotRecord, mass: float, *, precision: int = 64,
                        budget: int = DEFAULT_BUDGET) -> PointCloud:
    """Weighted cloud of the tile measure: one point per piece f_w(F) with |det f_w| <= mass.

    Each point sits at the barycenter f_w(b) of its piece and carries weight
    |det f_w|, so first moments of the measure are reproduced exactly by the
    cloud. `cell_size` bounds the distance from any tile point to the anchor of
    its piece.
    """
    if not 0 < mass < 1:
        raise ValueError("mass must lie in (0, 1)")
    emb, maps, mods, c, radius = _tent_data(record, precision)
    return _adaptive_render(maps, mods, radius, None, emb.d, budget, np.array(emb.block_sizes(), dtype=float),
                            tent_block_radii(record, precision), math.log(mass),
                            tent_barycenter(record, precision))


def default_depth(record: SpecialPisotRecord, pixel: float, precision: int = 64) -> int:
    """Smallest k with |lambda_max|^k * diam <= pixel / 2, diam estimated as 2 |Psi(1)|/(1-|lambda_max|)."""
    emb, pair = build_matrices(record, precision)
    fl, fr = tent_ifs_exact(record)
    c = max(emb.block_moduli(fl.m).max(), emb.block_moduli(fr.m).max())
    diam = 2.0 * float(np.linalg.norm(pair.psi_one)) / (1.0 - c)
    return max(1, math.ceil(math.log(pixel / (2.0 * diam)) / math.log(c)))


def hausdorff_distance(a, b, hint: float | None = None) -> float:
    """Symmetric Hausdorff distance between two finite point sets.

    `hint` is an expected upper value; it only speeds up the nearest-neighbour
    search and never changes the result.
    """
    pa = a.points if isinstance(a, PointCloud) else np.asarray(a, dtype=float)
    pb = b.points if isinstance(b, PointCloud) else np.asarray(b, dtype=float)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("empty cloud")
    if pa.ndim == 1:
        pa = pa[:, None]
    if pb.ndim == 1:
        pb = pb[:, None]
    if pa.shape[1] != pb.shape[1]:
        raise ValueError("dimension mismatch")
    return max(_directed(pa, pb, hint), _directed(pb, pa, hint))


def _directed(pa: np.ndarray, pb: np.ndarray, hint: float | None) -> float:
    tree = cKDTree(pb)
    if hint is None:
        return float(tree.query(pa, k=1)[0].max())
    # bounded search is much faster; only points beyond the hint need a full query
    dist, _ = tree.query(pa, k=1, distance_upper_bound=hint)
    far = ~np.isfinite(dist)
    if far.any():
        dist[far] = tree.query(pa[far], k=1)[0]
    return float(dist.max())


# -----------------------------------------------------------------------------
# one-dimensional exact tiles


@dataclass(frozen=True)
class ExactInterval:
    """Interval [Psi(lo), Psi(hi)] with endpoints given as field elements."""

    record_index: int
    lo: FieldElement
    hi: FieldElement
    lattice_step: FieldElement  # Psi(lattice_step) generates the 1-D lattice

    def numeric(self) -> tuple[float, float]:
        emb = build_embedding(registry_lookup(self.record_index))
        return float(emb.psi(self.lo)[0]), float(emb.psi(self.hi)[0])


def galois_conjugate(x: FieldElement) -> FieldElement:
    """Nontrivial automorphism of a quadratic field: Psi(x) equals this element at the dominant root."""
    fld = x.field
    if fld.degree != 2:
        raise ValueError("quadratic fields only")
    trace = -fld.minpoly.coeffs[1]
    c0, c1 = x.coeffs
    return fld.element([c0 + c1 * trace, -c1])


def psi_sign(x: FieldElement) -> int:
    """Sign of the real number Psi(x) in a quadratic field, decided exactly."""
    return sign_at_dominant_root(galois_conjugate(x))


def tent_interval_exact(i: int) -> ExactInterval:
    """Exact tent-tile of the two quadratic records, with the set equation verified."""
    if i not in (-2, 2):
        raise ValueError("only the quadratic records -2 and 2 have interval tent-tiles")
    rec = registry_lookup(i)
    a = rec.alpha
    b = beta_of(rec)
    half = Fraction(1, 2)
    if i == -2:
        # Psi(b - 1) = -phi, Psi(0) = 0; lattice step phi = Psi(1 - b)
        lo, hi, step = b - 1, a * 0, 1 - b
    else:
        # here alpha is phi itself; Psi(alpha/2) = (1-phi)/2 and Psi(1/2) = 1/2
        lo, hi, step = a * half, a * 0 + half, (1 - a) * half
    interval = ExactInterval(i, lo, hi, step)
    if not verify_interval_set_equation(interval):
        raise AssertionError("set equation failed")
    return interval


def _interval_image(f: ExactAffine, lo: FieldElement, hi: FieldElement):
    p, q = f.t + f.m * lo, f.t + f.m * hi
    return (p, q) if psi_sign(q - p) >= 0 else (q, p)


def verify_interval_set_equation(iv: ExactInterval) -> bool:
    """I = f_L(I) u f_R(I) by exact endpoint arithmetic."""
    rec = registry_lookup(iv.record_index)
    fl, fr = tent_ifs_exact(rec)
    if psi_sign(iv.hi - iv.lo) <= 0:
        return False
    imgs = sorted([_interval_image(fl, iv.lo, iv.hi), _interval_image(fr, iv.lo, iv.hi)],
                  key=lambda e: galois_conjugate(e[0]).value())
    (l1, h1), (l2, h2) = imgs
    return (l1 == iv.lo and h2 == iv.hi and psi_sign(l2 - h1) <= 0
            and psi_sign(h1 - iv.hi) <= 0 and psi_sign(iv.lo - l2) <= 0)


def verify_interval_lattice_tiling(iv: ExactInterval) -> bool:
    """Translates by the lattice step tile the line: the length equals the step and neighbours share endpoints only."""
    length = iv.hi - iv.lo
    step = iv.lattice_step
    return psi_sign(step) > 0 and length == step and (iv.lo + step) == iv.hi
